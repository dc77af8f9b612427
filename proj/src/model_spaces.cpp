#include "hadamard/model_spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace hadamard {

namespace {

Vector gaussian_vector(Rng& rng, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

Matrix symmetric_function(const Matrix& m, double (*fn)(double)) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const Vector mapped = es.eigenvalues().unaryExpr(fn);
  Matrix out = es.eigenvectors() * mapped.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

double clamp01(double t) { return std::clamp(t, 0.0, 1.0); }

}  // namespace

// ---------------------------------------------------------------------------
// Euclidean

EuclideanSpace::EuclideanSpace(int dim) : dim_(dim) {
  if (dim < 1) throw ConstructionError("Euclidean dimension must be >= 1");
}

std::string EuclideanSpace::name() const { return "Euclidean(" + std::to_string(dim_) + ")"; }

double EuclideanSpace::coord_distance(const Vector& x, const Vector& y) const {
  return (x - y).norm();
}

Vector EuclideanSpace::coord_geodesic(const Vector& x, const Vector& y, double t) const {
  return (1.0 - t) * x + t * y;
}

bool EuclideanSpace::coord_contains(const Vector& x) const { return x.allFinite(); }

Vector EuclideanSpace::coord_random(Rng& rng, const Vector& center, double scale) const {
  Vector v(dim_);
  for (int i = 0; i < dim_; ++i) v[i] = rng.uniform(-scale, scale);
  return center + v;
}

std::vector<Vector> EuclideanSpace::coord_spread(const Vector& from, double radius, int count,
                                                 Rng& rng) const {
  std::vector<Vector> out;
  for (int i = 0; i < dim_ && static_cast<int>(out.size()) < count; ++i) {
    for (double sign : {1.0, -1.0}) {
      if (static_cast<int>(out.size()) >= count) break;
      Vector v = from;
      v[i] += sign * radius;
      out.push_back(std::move(v));
    }
  }
  if (dim_ == 1) return out;
  while (static_cast<int>(out.size()) < count) {
    Vector u = gaussian_vector(rng, dim_);
    const double n = u.norm();
    if (n < 1e-12) continue;
    out.push_back(from + radius * u / n);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hyperbolic

HyperbolicSpace::HyperbolicSpace(int dim) : dim_(dim) {
  if (dim < 1) throw ConstructionError("hyperbolic dimension must be >= 1");
}

std::string HyperbolicSpace::name() const { return "Hyperbolic(" + std::to_string(dim_) + ")"; }

double HyperbolicSpace::minkowski(const Vector& x, const Vector& y) {
  return -x[0] * y[0] + x.tail(x.size() - 1).dot(y.tail(y.size() - 1));
}

Vector HyperbolicSpace::renormalize(const Vector& x) {
  Vector out = x;
  out[0] = std::sqrt(1.0 + x.tail(x.size() - 1).squaredNorm());
  return out;
}

Vector HyperbolicSpace::lift(const Vector& spatial) const {
  if (spatial.size() != dim_) throw DomainError("spatial vector has wrong dimension");
  Vector out(dim_ + 1);
  out[0] = 0.0;
  out.tail(dim_) = spatial;
  return renormalize(out);
}

Vector HyperbolicSpace::coord_base() const {
  Vector out = Vector::Zero(dim_ + 1);
  out[0] = 1.0;
  return out;
}

bool HyperbolicSpace::coord_contains(const Vector& x) const {
  if (!x.allFinite() || x[0] <= 0.0) return false;
  return std::abs(minkowski(x, x) + 1.0) <= kMembershipTolerance * (1.0 + x[0] * x[0]);
}

double HyperbolicSpace::coord_distance(const Vector& x, const Vector& y) const {
  // <x-y, x-y> = 4 sinh²(d/2); the time difference is rewritten through the
  // spatial coordinates to avoid cancellation between nearby points.
  const Vector dx = x.tail(dim_) - y.tail(dim_);
  const Vector sx = x.tail(dim_) + y.tail(dim_);
  const double dt = dx.dot(sx) / (x[0] + y[0]);
  const double q = std::max(0.0, dx.squaredNorm() - dt * dt);
  return 2.0 * std::asinh(0.5 * std::sqrt(q));
}

Vector HyperbolicSpace::coord_geodesic(const Vector& x, const Vector& y, double t) const {
  const double d = coord_distance(x, y);
  if (d < 1e-8) return renormalize((1.0 - t) * x + t * y);
  const double s = std::sinh(d);
  return renormalize((std::sinh((1.0 - t) * d) / s) * x + (std::sinh(t * d) / s) * y);
}

Vector HyperbolicSpace::log_map(const Vector& x, const Vector& y) const {
  const Vector u = y + minkowski(x, y) * x;
  const double nu = std::sqrt(std::max(0.0, minkowski(u, u)));
  if (nu < 1e-300) return Vector::Zero(x.size());
  return (coord_distance(x, y) / nu) * u;
}

Vector HyperbolicSpace::exp_map(const Vector& x, const Vector& v) const {
  const double n = std::sqrt(std::max(0.0, minkowski(v, v)));
  if (n < 1e-300) return x;
  return renormalize(std::cosh(n) * x + (std::sinh(n) / n) * v);
}

Vector HyperbolicSpace::coord_random(Rng& rng, const Vector& center, double scale) const {
  Vector w = gaussian_vector(rng, dim_ + 1);
  Vector v = w + minkowski(center, w) * center;
  const double n = std::sqrt(std::max(0.0, minkowski(v, v)));
  if (n < 1e-12) return center;
  return exp_map(center, (rng.uniform(0.0, scale) / n) * v);
}

std::vector<Vector> HyperbolicSpace::coord_spread(const Vector& from, double radius, int count,
                                                  Rng& rng) const {
  std::vector<Vector> out;
  auto push_direction = [&](const Vector& w) {
    Vector v = w + minkowski(from, w) * from;
    const double n = std::sqrt(std::max(0.0, minkowski(v, v)));
    if (n < 1e-12) return;
    out.push_back(exp_map(from, (radius / n) * v));
  };
  for (int i = 1; i <= dim_ && static_cast<int>(out.size()) < count; ++i) {
    for (double sign : {1.0, -1.0}) {
      if (static_cast<int>(out.size()) >= count) break;
      Vector w = Vector::Zero(dim_ + 1);
      w[i] = sign;
      push_direction(w);
    }
  }
  if (dim_ == 1) return out;
  while (static_cast<int>(out.size()) < count) push_direction(gaussian_vector(rng, dim_ + 1));
  return out;
}

// ---------------------------------------------------------------------------
// Metric trees

MetricTree::MetricTree(int vertex_count, std::vector<Edge> edges)
    : vertex_count_(vertex_count), edges_(std::move(edges)) {
  if (vertex_count_ < 2) throw ConstructionError("metric tree needs at least two vertices");
  if (static_cast<int>(edges_.size()) != vertex_count_ - 1) {
    throw ConstructionError("metric tree with " + std::to_string(vertex_count_) +
                            " vertices needs exactly " + std::to_string(vertex_count_ - 1) +
                            " edges");
  }
  incident_.assign(vertex_count_, {});
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& edge = edges_[e];
    if (edge.u < 0 || edge.u >= vertex_count_ || edge.v < 0 || edge.v >= vertex_count_ ||
        edge.u == edge.v) {
      throw ConstructionError("edge " + std::to_string(e) + " has invalid endpoints");
    }
    if (!(edge.length > 0.0) || !std::isfinite(edge.length)) {
      throw ConstructionError("edge " + std::to_string(e) + " must have positive finite length");
    }
    incident_[edge.u].push_back(static_cast<int>(e));
    incident_[edge.v].push_back(static_cast<int>(e));
  }

  vertex_dist_ = Matrix::Constant(vertex_count_, vertex_count_, -1.0);
  parent_.assign(vertex_count_, std::vector<int>(vertex_count_, -1));
  for (int root = 0; root < vertex_count_; ++root) {
    std::vector<int> stack{root};
    vertex_dist_(root, root) = 0.0;
    parent_[root][root] = root;
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      for (int e : incident_[p]) {
        const int q = edges_[e].u == p ? edges_[e].v : edges_[e].u;
        if (parent_[root][q] != -1) continue;
        parent_[root][q] = p;
        vertex_dist_(root, q) = vertex_dist_(root, p) + edges_[e].length;
        stack.push_back(q);
      }
    }
    if (root == 0) {
      for (int v = 0; v < vertex_count_; ++v) {
        if (parent_[0][v] == -1) {
          throw ConstructionError("metric tree is disconnected (vertex " + std::to_string(v) +
                                  " unreachable)");
        }
      }
    }
  }
}

std::shared_ptr<MetricTree> MetricTree::star(std::span<const double> leg_lengths) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < leg_lengths.size(); ++i) {
    edges.push_back({0, static_cast<int>(i + 1), leg_lengths[i]});
  }
  return std::make_shared<MetricTree>(static_cast<int>(leg_lengths.size() + 1), std::move(edges));
}

std::shared_ptr<MetricTree> MetricTree::path(int edge_count, double edge_length) {
  std::vector<Edge> edges;
  for (int i = 0; i < edge_count; ++i) edges.push_back({i, i + 1, edge_length});
  return std::make_shared<MetricTree>(edge_count + 1, std::move(edges));
}

std::string MetricTree::name() const {
  std::ostringstream os;
  os << "MetricTree(" << vertex_count_ << " vertices)";
  return os.str();
}

int MetricTree::edge_between(int u, int v) const {
  for (int e : incident_.at(u)) {
    if ((edges_[e].u == u && edges_[e].v == v) || (edges_[e].u == v && edges_[e].v == u)) return e;
  }
  return -1;
}

double MetricTree::vertex_distance(int u, int v) const { return vertex_dist_(u, v); }

std::vector<int> MetricTree::vertex_path(int from, int to) const {
  std::vector<int> out{to};
  while (out.back() != from) out.push_back(parent_[from][out.back()]);
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<int> MetricTree::leaves() const {
  std::vector<int> out;
  for (int v = 0; v < vertex_count_; ++v) {
    if (incident_[v].size() == 1) out.push_back(v);
  }
  return out;
}

Vector MetricTree::vertex_coords(int v) const {
  const int e = *std::min_element(incident_.at(v).begin(), incident_.at(v).end());
  return edge_coords(e, edges_[e].u == v ? 0.0 : edges_[e].length);
}

Vector MetricTree::edge_coords(int edge, double offset) const {
  Vector out(2);
  out << static_cast<double>(edge), offset;
  return out;
}

bool MetricTree::coord_contains(const Vector& x) const {
  if (!x.allFinite()) return false;
  const double r = std::round(x[0]);
  if (std::abs(x[0] - r) > kMembershipTolerance) return false;
  if (r < 0 || r >= static_cast<double>(edges_.size())) return false;
  const double len = edges_[static_cast<std::size_t>(r)].length;
  return x[1] >= -kMembershipTolerance * (1.0 + len) && x[1] <= len + kMembershipTolerance * (1.0 + len);
}

Vector MetricTree::coord_canonical(const Vector& x) const {
  const int e = static_cast<int>(std::round(x[0]));
  const Edge& edge = edges_.at(e);
  const double snap = 1e-13 * std::max(1.0, edge.length);
  const double s = std::clamp(x[1], 0.0, edge.length);
  if (s <= snap) return vertex_coords(edge.u);
  if (s >= edge.length - snap) return vertex_coords(edge.v);
  return edge_coords(e, s);
}

double MetricTree::coord_vertex_distance(const Vector& x, int v) const {
  const Edge& edge = edges_[static_cast<std::size_t>(std::lround(x[0]))];
  return std::min(x[1] + vertex_dist_(edge.u, v), edge.length - x[1] + vertex_dist_(edge.v, v));
}

MetricTree::Route MetricTree::route(const Vector& x, const Vector& y) const {
  const int ex = static_cast<int>(std::lround(x[0]));
  const int ey = static_cast<int>(std::lround(y[0]));
  if (ex == ey) return {std::abs(x[1] - y[1]), -1, -1};
  const Edge& a = edges_[ex];
  const Edge& b = edges_[ey];
  const double to_au = x[1], to_av = a.length - x[1];
  const double from_bu = y[1], from_bv = b.length - y[1];
  Route best{std::numeric_limits<double>::infinity(), -1, -1};
  auto consider = [&](double lead, int p, int q, double tail) {
    const double len = lead + vertex_dist_(p, q) + tail;
    if (len < best.length) best = {len, p, q};
  };
  consider(to_au, a.u, b.u, from_bu);
  consider(to_au, a.u, b.v, from_bv);
  consider(to_av, a.v, b.u, from_bu);
  consider(to_av, a.v, b.v, from_bv);
  return best;
}

double MetricTree::coord_distance(const Vector& x, const Vector& y) const {
  return route(x, y).length;
}

Vector MetricTree::coord_geodesic(const Vector& x, const Vector& y, double t) const {
  const Route r = route(x, y);
  const int ex = static_cast<int>(std::lround(x[0]));
  if (r.exit_vertex < 0) return coord_canonical(edge_coords(ex, x[1] + t * (y[1] - x[1])));

  double target = t * r.length;
  const Edge& a = edges_[ex];
  const double lead = r.exit_vertex == a.u ? x[1] : a.length - x[1];
  if (target <= lead) {
    const double s = r.exit_vertex == a.u ? x[1] - target : x[1] + target;
    return coord_canonical(edge_coords(ex, s));
  }
  target -= lead;
  const std::vector<int> path = vertex_path(r.exit_vertex, r.entry_vertex);
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const int e = edge_between(path[k], path[k + 1]);
    const double len = edges_[e].length;
    if (target <= len) {
      const double s = edges_[e].u == path[k] ? target : len - target;
      return coord_canonical(edge_coords(e, s));
    }
    target -= len;
  }
  const int ey = static_cast<int>(std::lround(y[0]));
  const Edge& b = edges_[ey];
  const double s = r.entry_vertex == b.u ? target : b.length - target;
  return coord_canonical(edge_coords(ey, std::clamp(s, 0.0, b.length)));
}

Vector MetricTree::coord_random(Rng& rng, const Vector& center, double scale) const {
  const double total = std::accumulate(edges_.begin(), edges_.end(), 0.0,
                                       [](double acc, const Edge& e) { return acc + e.length; });
  double pick = rng.uniform(0.0, total);
  std::size_t e = 0;
  while (e + 1 < edges_.size() && pick > edges_[e].length) {
    pick -= edges_[e].length;
    ++e;
  }
  Vector p = coord_canonical(edge_coords(static_cast<int>(e), rng.uniform(0.0, edges_[e].length)));
  const double d = coord_distance(center, p);
  if (d > scale && d > 0.0) p = coord_geodesic(center, p, scale / d);
  return p;
}

std::vector<Vector> MetricTree::coord_spread(const Vector& from, double radius, int count,
                                             Rng& /*rng*/) const {
  std::vector<Vector> out;
  for (int leaf : leaves()) {
    if (static_cast<int>(out.size()) >= count) break;
    const Vector end = vertex_coords(leaf);
    const double d = coord_distance(from, end);
    if (d <= 0.0) continue;
    out.push_back(coord_geodesic(from, end, clamp01(radius / d)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// SPD matrices

SpdSpace::SpdSpace(int n) : n_(n) {
  if (n < 1) throw ConstructionError("SPD size must be >= 1");
}

std::string SpdSpace::name() const { return "SPD(" + std::to_string(n_) + ")"; }

Matrix SpdSpace::to_matrix(const Vector& x) const {
  return Eigen::Map<const Matrix>(x.data(), n_, n_);
}

Vector SpdSpace::to_coords(const Matrix& m) const {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Vector SpdSpace::coord_base() const { return to_coords(Matrix::Identity(n_, n_)); }

bool SpdSpace::coord_contains(const Vector& x) const {
  if (!x.allFinite()) return false;
  const Matrix m = to_matrix(x);
  if ((m - m.transpose()).norm() > 1e-8 * (1.0 + m.norm())) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > 0.0;
}

Vector SpdSpace::coord_canonical(const Vector& x) const {
  const Matrix m = to_matrix(x);
  return to_coords(0.5 * (m + m.transpose()));
}

double SpdSpace::coord_distance(const Vector& x, const Vector& y) const {
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(to_matrix(y), to_matrix(x),
                                                       Eigen::EigenvaluesOnly);
  return ges.eigenvalues().unaryExpr([](double l) { return std::log(l); }).norm();
}

Matrix SpdSpace::whitened_log(const Matrix& a, const Matrix& b) const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  const Matrix inv_half = es.operatorInverseSqrt();
  const Matrix m = inv_half * b * inv_half;
  return symmetric_function(0.5 * (m + m.transpose()), [](double l) { return std::log(l); });
}

Matrix SpdSpace::whitened_exp(const Matrix& a, const Matrix& s) const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  const Matrix half = es.operatorSqrt();
  const Matrix out = half * symmetric_function(s, [](double l) { return std::exp(l); }) * half;
  return 0.5 * (out + out.transpose());
}

Vector SpdSpace::coord_geodesic(const Vector& x, const Vector& y, double t) const {
  return coord_geodesic_path(x, y)(t);
}

std::function<Vector(double)> SpdSpace::coord_geodesic_path(const Vector& x,
                                                            const Vector& y) const {
  Eigen::SelfAdjointEigenSolver<Matrix> ea(to_matrix(x));
  const Matrix half = ea.operatorSqrt();
  const Matrix inv_half = ea.operatorInverseSqrt();
  const Matrix m = inv_half * to_matrix(y) * inv_half;
  Eigen::SelfAdjointEigenSolver<Matrix> em(0.5 * (m + m.transpose()));
  const Matrix frame = half * em.eigenvectors();
  const Vector logs = em.eigenvalues().unaryExpr([](double l) { return std::log(l); });
  return [this, frame, logs](double t) {
    const Vector scale = (t * logs).unaryExpr([](double l) { return std::exp(l); });
    const Matrix out = frame * scale.asDiagonal() * frame.transpose();
    return to_coords(0.5 * (out + out.transpose()));
  };
}

Vector SpdSpace::coord_random(Rng& rng, const Vector& center, double scale) const {
  Matrix s(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j <= i; ++j) s(i, j) = s(j, i) = rng.normal();
  }
  const double norm = s.norm();
  if (norm < 1e-12) return center;
  return to_coords(whitened_exp(to_matrix(center), (rng.uniform(0.0, scale) / norm) * s));
}

std::vector<Vector> SpdSpace::coord_spread(const Vector& from, double radius, int count,
                                           Rng& rng) const {
  const Matrix a = to_matrix(from);
  std::vector<Vector> out;
  auto push = [&](const Matrix& u) {
    out.push_back(to_coords(whitened_exp(a, (radius / u.norm()) * u)));
  };
  for (int i = 0; i < n_ && static_cast<int>(out.size()) < count; ++i) {
    for (int j = 0; j <= i && static_cast<int>(out.size()) < count; ++j) {
      Matrix u = Matrix::Zero(n_, n_);
      u(i, j) = u(j, i) = 1.0;
      push(u);
      if (static_cast<int>(out.size()) < count) push(-u);
    }
  }
  while (static_cast<int>(out.size()) < count) {
    Matrix s(n_, n_);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j <= i; ++j) s(i, j) = s(j, i) = rng.normal();
    }
    if (s.norm() > 1e-12) push(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Products

ProductSpace::ProductSpace(std::vector<SpacePtr> factors, std::vector<double> weights)
    : factors_(std::move(factors)), weights_(std::move(weights)) {
  if (factors_.empty()) throw ConstructionError("product needs at least one factor");
  if (weights_.empty()) weights_.assign(factors_.size(), 1.0);
  if (weights_.size() != factors_.size()) {
    throw ConstructionError("product weights do not match the number of factors");
  }
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (!factors_[i]) throw ConstructionError("null product factor");
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) {
      throw ConstructionError("product weights must be positive");
    }
    offsets_.push_back(total_size_);
    total_size_ += factors_[i]->coord_size();
  }
}

std::string ProductSpace::name() const {
  std::string out = "Product(";
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) out += ", ";
    out += factors_[i]->name();
  }
  return out + ")";
}

Vector ProductSpace::coord_component(std::size_t i, const Vector& x) const {
  return x.segment(offsets_[i], factors_[i]->coord_size());
}

Point ProductSpace::component(std::size_t i, const Point& x) const {
  require_member(x);
  if (i >= factors_.size()) throw DomainError("factor index out of range");
  return factors_[i]->wrap(coord_component(i, x.coords));
}

Point ProductSpace::assemble(std::span<const Point> components) const {
  if (components.size() != factors_.size()) throw DomainError("wrong number of components");
  Vector out(total_size_);
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    factors_[i]->require_member(components[i]);
    out.segment(offsets_[i], factors_[i]->coord_size()) = components[i].coords;
  }
  return wrap(std::move(out));
}

double ProductSpace::coord_distance(const Vector& x, const Vector& y) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const double d = factors_[i]->coord_distance(coord_component(i, x), coord_component(i, y));
    sum += weights_[i] * d * d;
  }
  return std::sqrt(sum);
}

Vector ProductSpace::coord_geodesic(const Vector& x, const Vector& y, double t) const {
  Vector out(total_size_);
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    out.segment(offsets_[i], factors_[i]->coord_size()) =
        factors_[i]->coord_geodesic(coord_component(i, x), coord_component(i, y), t);
  }
  return out;
}

bool ProductSpace::coord_contains(const Vector& x) const {
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (!factors_[i]->coord_contains(coord_component(i, x))) return false;
  }
  return true;
}

Vector ProductSpace::coord_canonical(const Vector& x) const {
  Vector out(total_size_);
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    out.segment(offsets_[i], factors_[i]->coord_size()) =
        factors_[i]->coord_canonical(coord_component(i, x));
  }
  return out;
}

Vector ProductSpace::coord_base() const {
  Vector out(total_size_);
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    out.segment(offsets_[i], factors_[i]->coord_size()) = factors_[i]->coord_base();
  }
  return out;
}

Vector ProductSpace::coord_random(Rng& rng, const Vector& center, double scale) const {
  Vector out(total_size_);
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    out.segment(offsets_[i], factors_[i]->coord_size()) =
        factors_[i]->coord_random(rng, coord_component(i, center), scale);
  }
  return out;
}

std::vector<Vector> ProductSpace::coord_spread(const Vector& from, double radius, int count,
                                               Rng& rng) const {
  const int n = static_cast<int>(factors_.size());
  const int pure_each = std::max(1, count / (2 * n));
  std::vector<std::vector<Vector>> dirs(n);
  for (int i = 0; i < n; ++i) {
    dirs[i] = factors_[i]->coord_spread(coord_component(i, from),
                                        radius / std::sqrt(weights_[i]),
                                        std::max(pure_each, count), rng);
  }
  std::vector<Vector> out;
  // Directions moving a single factor first; they realize product slices.
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < pure_each && k < static_cast<int>(dirs[i].size()); ++k) {
      Vector v = from;
      v.segment(offsets_[i], factors_[i]->coord_size()) = dirs[i][k];
      out.push_back(std::move(v));
    }
  }
  int k = 0;
  while (static_cast<int>(out.size()) < count) {
    Vector mix(n);
    for (int i = 0; i < n; ++i) mix[i] = std::abs(rng.normal());
    if (mix.norm() < 1e-12) continue;
    mix /= mix.norm();
    Vector v = from;
    for (int i = 0; i < n; ++i) {
      if (dirs[i].empty()) continue;
      const Vector fi = coord_component(i, from);
      const Vector& target = dirs[i][static_cast<std::size_t>(k) % dirs[i].size()];
      v.segment(offsets_[i], factors_[i]->coord_size()) =
          factors_[i]->coord_geodesic(fi, target, mix[i]);
    }
    out.push_back(std::move(v));
    ++k;
  }
  return out;
}

Point product_slice_project(const ProductSpace& space, std::size_t keep, const Point& anchor,
                            const Point& x) {
  space.require_member(anchor);
  space.require_member(x);
  if (keep >= space.factor_count()) throw DomainError("factor index out of range");
  Vector out = anchor.coords;
  out.segment(space.offset(keep), space.factor(keep)->coord_size()) =
      space.coord_component(keep, x.coords);
  return space.wrap(std::move(out));
}

Point product_space_project(const ModelSpace& space, std::size_t i, const Point& x) {
  const auto* product = dynamic_cast<const ProductSpace*>(&space);
  if (!product) throw DomainError("product_space_project needs a product space");
  if (i >= product->factor_count()) throw DomainError("factor index out of range");
  return product->component(i, x);
}

void self_test(const ModelSpace& space, int trials) {
  Rng rng(0x5e1f7e57ULL, static_cast<std::uint64_t>(space.kind()));
  const Point base = space.base_point();
  for (int k = 0; k < trials; ++k) {
    const Point x = space.random_point(rng, base, 2.0);
    const Point c = space.random_point(rng, base, 2.0);
    const Point cp = space.random_point(rng, base, 2.0);
    const DefectReport r = check_cn(space, x, c, cp);
    if (r.defect < -kDefectTolerance) {
      throw ConstructionError(space.name() + " failed the CN self-test (defect " +
                              std::to_string(r.defect) + ")");
    }
  }
}

SpacePtr make_euclidean(int dim) {
  auto s = std::make_shared<EuclideanSpace>(dim);
  self_test(*s);
  return s;
}

SpacePtr make_hyperbolic(int dim) {
  auto s = std::make_shared<HyperbolicSpace>(dim);
  self_test(*s);
  return s;
}

SpacePtr make_tree(int vertex_count, std::vector<MetricTree::Edge> edges) {
  auto s = std::make_shared<MetricTree>(vertex_count, std::move(edges));
  self_test(*s);
  return s;
}

SpacePtr make_spd(int n) {
  auto s = std::make_shared<SpdSpace>(n);
  self_test(*s);
  return s;
}

SpacePtr make_product(std::vector<SpacePtr> factors) {
  auto s = std::make_shared<ProductSpace>(std::move(factors));
  self_test(*s);
  return s;
}

}  // namespace hadamard
