#include "hadamard/isometry.hpp"

#include <cmath>

namespace hadamard {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Matrix minkowski_form(Eigen::Index n) {
  Matrix j = Matrix::Identity(n, n);
  j(0, 0) = -1.0;
  return j;
}

const MetricTree& as_tree(const ModelSpace& s) { return dynamic_cast<const MetricTree&>(s); }
const SpdSpace& as_spd(const ModelSpace& s) { return dynamic_cast<const SpdSpace&>(s); }
const ProductSpace& as_product(const ModelSpace& s) { return dynamic_cast<const ProductSpace&>(s); }

}  // namespace

Isometry::Isometry(SpacePtr space, IsometryPayload payload)
    : space_(std::move(space)), payload_(std::move(payload)) {
  validate();
}

Isometry::Isometry(SpacePtr space, IsometryPayload payload, Unchecked)
    : space_(std::move(space)), payload_(std::move(payload)) {}

void Isometry::validate() const {
  if (!space_) throw ConstructionError("isometry without a space");
  const ModelSpace& s = *space_;
  std::visit(
      Overloaded{
          [&](const EuclideanMotion& m) {
            if (s.kind() != SpaceKind::euclidean) {
              throw ConstructionError("Euclidean motion on " + s.name());
            }
            const Eigen::Index n = s.coord_size();
            if (m.linear.rows() != n || m.linear.cols() != n || m.translation.size() != n) {
              throw ConstructionError("Euclidean motion has wrong shape");
            }
            if ((m.linear.transpose() * m.linear - Matrix::Identity(n, n)).norm() > 1e-9) {
              throw ConstructionError("Euclidean motion is not orthogonal");
            }
          },
          [&](const LorentzTransform& l) {
            if (s.kind() != SpaceKind::hyperbolic) {
              throw ConstructionError("Lorentz transform on " + s.name());
            }
            const Eigen::Index n = s.coord_size();
            if (l.matrix.rows() != n || l.matrix.cols() != n) {
              throw ConstructionError("Lorentz transform has wrong shape");
            }
            const Matrix j = minkowski_form(n);
            const double scale = 1.0 + l.matrix.squaredNorm();
            if ((l.matrix.transpose() * j * l.matrix - j).norm() > 1e-9 * scale) {
              throw ConstructionError("matrix does not preserve the Minkowski form");
            }
            if (l.matrix(0, 0) <= 0.0) {
              throw ConstructionError("Lorentz transform swaps the hyperboloid sheets");
            }
          },
          [&](const TreeAutomorphism& a) {
            if (s.kind() != SpaceKind::tree) {
              throw ConstructionError("tree automorphism on " + s.name());
            }
            const MetricTree& tree = as_tree(s);
            const int n = tree.vertex_count();
            if (static_cast<int>(a.vertex_map.size()) != n) {
              throw ConstructionError("vertex map has wrong size");
            }
            std::vector<bool> seen(n, false);
            for (int v : a.vertex_map) {
              if (v < 0 || v >= n || seen[v]) throw ConstructionError("vertex map is not a bijection");
              seen[v] = true;
            }
            for (const auto& e : tree.edges()) {
              const int image = tree.edge_between(a.vertex_map[e.u], a.vertex_map[e.v]);
              if (image < 0 || std::abs(tree.edges()[image].length - e.length) > 1e-12) {
                throw ConstructionError("vertex map does not preserve edges and lengths");
              }
            }
          },
          [&](const Congruence& c) {
            if (s.kind() != SpaceKind::spd) throw ConstructionError("congruence on " + s.name());
            const int n = as_spd(s).n();
            if (c.factor.rows() != n || c.factor.cols() != n) {
              throw ConstructionError("congruence factor has wrong shape");
            }
            Eigen::JacobiSVD<Matrix> svd(c.factor);
            const Vector sv = svd.singularValues();
            if (sv.minCoeff() <= 1e-12 * std::max(1.0, sv.maxCoeff())) {
              throw ConstructionError("congruence factor is not invertible");
            }
          },
          [&](const FactorwiseIsometry& f) {
            const auto* product = dynamic_cast<const ProductSpace*>(&s);
            if (!product) throw ConstructionError("factorwise isometry on " + s.name());
            if (f.factors.size() != product->factor_count()) {
              throw ConstructionError("factorwise isometry has wrong number of factors");
            }
            for (std::size_t i = 0; i < f.factors.size(); ++i) {
              if (f.factors[i].space().get() != product->factor(i).get()) {
                throw ConstructionError("factor isometry acts on the wrong space");
              }
            }
          },
      },
      payload_);

  Rng rng(0x150e7e7ULL);
  const Point base = s.base_point();
  for (int k = 0; k < 16; ++k) {
    const Point x = s.random_point(rng, base, 2.0);
    const Point y = s.random_point(rng, base, 2.0);
    const double d = s.distance(x, y);
    const double dg = s.distance(apply(x), apply(y));
    if (std::abs(d - dg) > 1e-9 * (1.0 + d)) {
      throw ConstructionError("map does not preserve distances on " + s.name());
    }
  }
}

Isometry Isometry::identity(SpacePtr space) {
  const ModelSpace& s = *space;
  switch (s.kind()) {
    case SpaceKind::euclidean: {
      const auto n = s.coord_size();
      return Isometry(space, EuclideanMotion{Matrix::Identity(n, n), Vector::Zero(n)}, Unchecked{});
    }
    case SpaceKind::hyperbolic: {
      const auto n = s.coord_size();
      return Isometry(space, LorentzTransform{Matrix::Identity(n, n)}, Unchecked{});
    }
    case SpaceKind::tree: {
      std::vector<int> map(as_tree(s).vertex_count());
      for (std::size_t i = 0; i < map.size(); ++i) map[i] = static_cast<int>(i);
      return Isometry(space, TreeAutomorphism{std::move(map)}, Unchecked{});
    }
    case SpaceKind::spd: {
      const int n = as_spd(s).n();
      return Isometry(space, Congruence{Matrix::Identity(n, n)}, Unchecked{});
    }
    case SpaceKind::product:
    case SpaceKind::l2: {
      FactorwiseIsometry f;
      for (const auto& factor : as_product(s).factors()) f.factors.push_back(identity(factor));
      return Isometry(space, std::move(f), Unchecked{});
    }
  }
  throw ConstructionError("unknown space kind");
}

Vector Isometry::apply_coords(const Vector& x) const {
  const ModelSpace& s = *space_;
  return std::visit(
      Overloaded{
          [&](const EuclideanMotion& m) -> Vector { return m.linear * x + m.translation; },
          [&](const LorentzTransform& l) -> Vector {
            return HyperbolicSpace::renormalize(l.matrix * x);
          },
          [&](const TreeAutomorphism& a) -> Vector {
            const MetricTree& tree = as_tree(s);
            const int e = static_cast<int>(std::lround(x[0]));
            const auto& edge = tree.edges()[e];
            const int pu = a.vertex_map[edge.u];
            const int image = tree.edge_between(pu, a.vertex_map[edge.v]);
            const auto& target = tree.edges()[image];
            const double offset = target.u == pu ? x[1] : target.length - x[1];
            return tree.coord_canonical(tree.edge_coords(image, offset));
          },
          [&](const Congruence& c) -> Vector {
            const SpdSpace& spd = as_spd(s);
            const Matrix m = c.factor * spd.to_matrix(x) * c.factor.transpose();
            return spd.to_coords(0.5 * (m + m.transpose()));
          },
          [&](const FactorwiseIsometry& f) -> Vector {
            const ProductSpace& p = as_product(s);
            Vector out(x.size());
            for (std::size_t i = 0; i < f.factors.size(); ++i) {
              out.segment(p.offset(i), p.factor(i)->coord_size()) =
                  f.factors[i].apply_coords(p.coord_component(i, x));
            }
            return out;
          },
      },
      payload_);
}

Point Isometry::apply(const Point& x) const {
  space_->require_member(x);
  return space_->wrap(apply_coords(x.coords));
}

Isometry Isometry::compose(const Isometry& inner) const {
  if (inner.space_.get() != space_.get()) throw DomainError("composing isometries of different spaces");
  IsometryPayload out = std::visit(
      Overloaded{
          [&](const EuclideanMotion& m) -> IsometryPayload {
            const auto& n = std::get<EuclideanMotion>(inner.payload_);
            return EuclideanMotion{m.linear * n.linear, m.linear * n.translation + m.translation};
          },
          [&](const LorentzTransform& l) -> IsometryPayload {
            return LorentzTransform{l.matrix * std::get<LorentzTransform>(inner.payload_).matrix};
          },
          [&](const TreeAutomorphism& a) -> IsometryPayload {
            const auto& b = std::get<TreeAutomorphism>(inner.payload_);
            std::vector<int> map(a.vertex_map.size());
            for (std::size_t i = 0; i < map.size(); ++i) map[i] = a.vertex_map[b.vertex_map[i]];
            return TreeAutomorphism{std::move(map)};
          },
          [&](const Congruence& c) -> IsometryPayload {
            return Congruence{c.factor * std::get<Congruence>(inner.payload_).factor};
          },
          [&](const FactorwiseIsometry& f) -> IsometryPayload {
            const auto& g = std::get<FactorwiseIsometry>(inner.payload_);
            FactorwiseIsometry h;
            for (std::size_t i = 0; i < f.factors.size(); ++i) {
              h.factors.push_back(f.factors[i].compose(g.factors[i]));
            }
            return h;
          },
      },
      payload_);
  return Isometry(space_, std::move(out), Unchecked{});
}

Isometry Isometry::inverse() const {
  IsometryPayload out = std::visit(
      Overloaded{
          [&](const EuclideanMotion& m) -> IsometryPayload {
            const Matrix qt = m.linear.transpose();
            return EuclideanMotion{qt, -(qt * m.translation)};
          },
          [&](const LorentzTransform& l) -> IsometryPayload {
            const Matrix j = minkowski_form(l.matrix.rows());
            return LorentzTransform{j * l.matrix.transpose() * j};
          },
          [&](const TreeAutomorphism& a) -> IsometryPayload {
            std::vector<int> inv(a.vertex_map.size());
            for (std::size_t i = 0; i < inv.size(); ++i) inv[a.vertex_map[i]] = static_cast<int>(i);
            return TreeAutomorphism{std::move(inv)};
          },
          [&](const Congruence& c) -> IsometryPayload { return Congruence{c.factor.inverse()}; },
          [&](const FactorwiseIsometry& f) -> IsometryPayload {
            FactorwiseIsometry h;
            for (const auto& g : f.factors) h.factors.push_back(g.inverse());
            return h;
          },
      },
      payload_);
  return Isometry(space_, std::move(out), Unchecked{});
}

Isometry Isometry::power(int n) const {
  Isometry base = n < 0 ? inverse() : *this;
  Isometry out = identity(space_);
  for (int k = 0; k < std::abs(n); ++k) out = base.compose(out);
  return out;
}

Point apply_isometry(const Isometry& g, const Point& x) { return g.apply(x); }

Isometry euclidean_rotation(SpacePtr space, double angle, const Vector& center, int i, int j) {
  const auto n = space->coord_size();
  if (center.size() != n) throw DomainError("rotation center has wrong dimension");
  Matrix q = Matrix::Identity(n, n);
  q(i, i) = std::cos(angle);
  q(i, j) = -std::sin(angle);
  q(j, i) = std::sin(angle);
  q(j, j) = std::cos(angle);
  return Isometry(space, EuclideanMotion{q, center - q * center});
}

Isometry euclidean_translation(SpacePtr space, const Vector& v) {
  const auto n = space->coord_size();
  return Isometry(space, EuclideanMotion{Matrix::Identity(n, n), v});
}

Isometry hyperbolic_boost(SpacePtr space, int axis, double length) {
  const auto n = space->coord_size();
  Matrix l = Matrix::Identity(n, n);
  l(0, 0) = std::cosh(length);
  l(0, axis) = std::sinh(length);
  l(axis, 0) = std::sinh(length);
  l(axis, axis) = std::cosh(length);
  return Isometry(space, LorentzTransform{l});
}

Isometry hyperbolic_rotation(SpacePtr space, double angle, int i, int j) {
  const auto n = space->coord_size();
  Matrix l = Matrix::Identity(n, n);
  l(i, i) = std::cos(angle);
  l(i, j) = -std::sin(angle);
  l(j, i) = std::sin(angle);
  l(j, j) = std::cos(angle);
  return Isometry(space, LorentzTransform{l});
}

}  // namespace hadamard
