#include "hadamard/suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "hadamard/parallel.hpp"

namespace hadamard {

namespace {

// Worst value over trials, reduced in index order.
template <class F>
double worst_over(std::size_t trials, F&& f) {
  std::vector<double> values(trials);
  parallel_for(trials, [&](std::size_t i) { values[i] = f(i); });
  double w = std::numeric_limits<double>::infinity();
  for (double v : values) w = std::min(w, v);
  return trials ? w : 0.0;
}

Point random_near_base(const ModelSpace& s, Rng& rng) {
  return s.random_point(rng, s.base_point(), rng.uniform(0.1, 3.0));
}

std::vector<double> random_weights(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) {
    x = rng.uniform(0.05, 1.0);
    total += x;
  }
  for (auto& x : w) x /= total;
  // make the sum exact to the last bit on the final weight
  double head = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) head += w[i];
  w[n - 1] = 1.0 - head;
  return w;
}

struct BaryPair {
  double dxx;
  std::vector<double> w;
  std::vector<double> dist;
};

BaryPair bary_pair(const ModelSpace& s, Rng& rng) {
  const std::size_t n = 2 + rng.index(4);
  std::vector<Point> f, fp;
  const bool nearby = rng.uniform() < 0.5;
  for (std::size_t i = 0; i < n; ++i) {
    f.push_back(random_near_base(s, rng));
    fp.push_back(nearby ? s.random_point(rng, f.back(), rng.uniform(0.01, 0.5))
                        : random_near_base(s, rng));
  }
  BaryPair p;
  p.w = random_weights(rng, n);
  const Point b = barycenter(s, f, p.w).point;
  const Point bp = barycenter(s, fp, p.w).point;
  p.dxx = s.distance(b, bp);
  for (std::size_t i = 0; i < n; ++i) p.dist.push_back(s.distance(f[i], fp[i]));
  return p;
}

std::string label_detail(const ModelSpace& s) { return s.name(); }

// Whether the hull of a few points is bounded by geodesic pieces, so that
// descent toward the hull samples reaches the exact projection.
bool polygonal_hulls(const ModelSpace& s) {
  switch (s.kind()) {
    case SpaceKind::euclidean:
    case SpaceKind::tree:
      return true;
    case SpaceKind::hyperbolic:
      return s.coord_size() <= 3;
    case SpaceKind::spd:
      return s.coord_size() == 1;
    case SpaceKind::product:
    case SpaceKind::l2: {
      // a tree factor times anything else branches along a flat, and descent
      // stalls on the branch locus
      const auto& prod = static_cast<const ProductSpace&>(s);
      for (const auto& f : prod.factors()) {
        if (f->kind() != SpaceKind::euclidean) return false;
      }
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<NamedSpace> standard_spaces() {
  using E = MetricTree::Edge;
  std::vector<NamedSpace> out;
  out.push_back({"euclidean2", make_euclidean(2)});
  out.push_back({"euclidean3", make_euclidean(3)});
  out.push_back({"hyperbolic2", make_hyperbolic(2)});
  out.push_back({"tree_tripod", make_tree(4, {E{0, 1, 1.0}, E{0, 2, 1.0}, E{0, 3, 1.0}})});
  out.push_back(
      {"tree_star", make_tree(5, {E{0, 1, 0.5}, E{0, 2, 1.0}, E{0, 3, 2.0}, E{0, 4, 3.0}})});
  out.push_back({"tree_caterpillar",
                 make_tree(9, {E{0, 1, 1.0}, E{1, 2, 0.7}, E{2, 3, 1.3}, E{3, 4, 0.9}, E{1, 5, 0.4},
                               E{2, 6, 2.0}, E{3, 7, 0.25}, E{1, 8, 1.1}})});
  out.push_back({"spd2", make_spd(2)});
  out.push_back({"tripod_x_r", make_product({out[3].space, make_euclidean(1)})});
  out.push_back({"hyperbolic2_x_r", make_product({make_hyperbolic(2), make_euclidean(1)})});
  return out;
}

SpacePtr standard_space(const std::string& label) {
  for (auto& s : standard_spaces()) {
    if (s.label == label) return s.space;
  }
  throw DomainError("unknown space label " + label);
}

Check cn_suite(const ModelSpace& s, std::size_t trials, std::uint64_t seed) {
  const double w = worst_over(trials, [&](std::size_t i) {
    Rng rng(seed, 0xc0, i);
    const Point x = random_near_base(s, rng);
    const Point c = random_near_base(s, rng);
    const Point cp = rng.uniform() < 0.05 ? c : random_near_base(s, rng);
    return check_cn(s, x, c, cp).defect;
  });
  return {"cn", w, kDefectTolerance, trials, label_detail(s)};
}

Check cn_equality_suite(const ModelSpace& s, std::size_t trials, std::uint64_t seed) {
  const double w = worst_over(trials, [&](std::size_t i) {
    Rng rng(seed, 0xc1, i);
    const Point x = random_near_base(s, rng);
    const Point c = random_near_base(s, rng);
    const Point cp = random_near_base(s, rng);
    return -std::abs(check_cn(s, x, c, cp).defect);
  });
  return {"cn_equality", w, kDefectTolerance, trials, label_detail(s)};
}

Check reshetnyak_suite(const ModelSpace& s, std::size_t trials, double eps, std::uint64_t seed) {
  const double w = worst_over(trials, [&](std::size_t i) {
    Rng rng(seed, 0xe5, i);
    const Point x = random_near_base(s, rng);
    const Point xp = rng.uniform() < 0.05 ? x : random_near_base(s, rng);
    const Point y = random_near_base(s, rng);
    const Point yp = random_near_base(s, rng);
    return check_reshetnyak(s, x, xp, y, yp, eps).defect;
  });
  char name[64];
  std::snprintf(name, sizeof name, "reshetnyak_eps_%g", eps);
  return {name, w, kDefectTolerance, trials, label_detail(s)};
}

Check geodesic_suite(const ModelSpace& s, std::size_t trials, std::uint64_t seed) {
  const double w = worst_over(trials, [&](std::size_t i) {
    Rng rng(seed, 0x9e, i);
    const Point x = random_near_base(s, rng);
    const Point y = random_near_base(s, rng);
    const double t = rng.uniform();
    const Point m = s.geodesic_point(x, y, t);
    const double d = s.distance(x, y);
    return -std::max(std::abs(s.distance(x, m) - t * d), std::abs(s.distance(m, y) - (1 - t) * d));
  });
  return {"geodesic_contract", w, kDefectTolerance, trials, label_detail(s)};
}

Check metric_suite(const ModelSpace& s, std::size_t trials, std::uint64_t seed) {
  const double w = worst_over(trials, [&](std::size_t i) {
    Rng rng(seed, 0x3e, i);
    const Point x = random_near_base(s, rng);
    const Point y = random_near_base(s, rng);
    const Point z = random_near_base(s, rng);
    const double sym = std::abs(s.distance(x, y) - s.distance(y, x));
    const double tri = s.distance(x, y) + s.distance(y, z) - s.distance(x, z);
    return std::min(-sym, tri);
  });
  return {"symmetry_triangle", w, kDefectTolerance, trials, label_detail(s)};
}

Check projection_suite(const SpacePtr& space, std::size_t trials, std::uint64_t seed) {
  const ModelSpace& s = *space;
  const std::size_t per_body = 10;
  const std::size_t bodies = (trials + per_body - 1) / per_body;
  std::vector<double> values(trials, 0.0);
  parallel_for(bodies, [&](std::size_t b) {
    Rng rng(seed, 0x9a, b);
    std::vector<Point> gens;
    const std::size_t n = 2 + rng.index(2);
    const std::size_t used = polygonal_hulls(s) ? n : 2;
    for (std::size_t k = 0; k < used; ++k) gens.push_back(random_near_base(s, rng));
    const ConvexBody body = dyadic_hull(space, gens, used == 2 ? 3 : 2);
    for (std::size_t i = b * per_body; i < std::min(trials, (b + 1) * per_body); ++i) {
      const Point x = s.random_point(rng, s.base_point(), 4.0);
      const Point y = rng.uniform() < 0.5 ? s.random_point(rng, x, 0.3) : random_near_base(s, rng);
      values[i] = s.distance(x, y) - s.distance(project(body, x), project(body, y));
    }
  });
  double w = trials ? *std::min_element(values.begin(), values.end()) : 0.0;
  return {"projection_lipschitz", w, 1e-6, trials, label_detail(s)};
}

Check nested_circum_suite(const SpacePtr& space, std::size_t trials, std::uint64_t seed) {
  const ModelSpace& s = *space;
  const double w = worst_over(trials, [&](std::size_t i) {
    Rng rng(seed, 0x4e, i);
    std::vector<Point> gens;
    const std::size_t n = 1 + rng.index(4);
    for (std::size_t k = 0; k < n; ++k) gens.push_back(random_near_base(s, rng));
    std::vector<Point> outer = gens;
    const std::size_t extra = rng.index(3);
    for (std::size_t k = 0; k < extra; ++k) {
      outer.push_back(rng.uniform() < 0.5 ? s.random_point(rng, gens[0], rng.uniform(0.05, 1.0))
                                          : random_near_base(s, rng));
    }
    const ConvexBody e = dyadic_hull(space, gens, 1);
    const ConvexBody ep = dyadic_hull(space, outer, 1);
    return nested_circum_check(e, ep).defect;
  });
  return {"nested_circumcentre", w, 1e-6, trials, label_detail(s)};
}

Check bary_contraction_suite(const ModelSpace& s, std::size_t trials, std::uint64_t seed) {
  const double w = worst_over(trials, [&](std::size_t i) {
    Rng rng(seed, 0xb1, i);
    const BaryPair p = bary_pair(s, rng);
    double rhs = 0.0;
    for (std::size_t k = 0; k < p.w.size(); ++k) rhs += p.w[k] * p.dist[k];
    return rhs - p.dxx;
  });
  return {"barycentre_contraction", w, 1e-6, trials, label_detail(s)};
}

Check bary_strengthened_suite(const ModelSpace& s, std::size_t trials, std::uint64_t seed) {
  const double w = worst_over(trials, [&](std::size_t i) {
    Rng rng(seed, 0xb2, i);
    const BaryPair p = bary_pair(s, rng);
    double rhs = 0.0;
    for (std::size_t k = 0; k < p.w.size(); ++k) {
      rhs += p.w[k] * (p.dist[k] * p.dist[k] - (p.dist[k] - p.dxx) * (p.dist[k] - p.dxx));
    }
    return rhs - p.dxx * p.dxx;
  });
  return {"barycentre_strengthened", w, 1e-6, trials, label_detail(s)};
}

Check euclidean_mean_suite(const ModelSpace& s, std::size_t trials, std::uint64_t seed) {
  const double w = worst_over(trials, [&](std::size_t i) {
    Rng rng(seed, 0xb3, i);
    const std::size_t n = 1 + rng.index(6);
    std::vector<Point> pts;
    for (std::size_t k = 0; k < n; ++k) pts.push_back(random_near_base(s, rng));
    const auto wts = random_weights(rng, n);
    Vector mean = Vector::Zero(s.coord_size());
    for (std::size_t k = 0; k < n; ++k) mean += wts[k] * pts[k].coords;
    return -(barycenter(s, pts, wts).point.coords - mean).norm();
  });
  return {"euclidean_mean", w, 1e-9, trials, label_detail(s)};
}

std::vector<Check> fuzz_space(const NamedSpace& ns, std::size_t trials, std::uint64_t seed) {
  const ModelSpace& s = *ns.space;
  std::vector<Check> out;
  out.push_back(cn_suite(s, trials, seed));
  if (s.kind() == SpaceKind::euclidean) out.push_back(cn_equality_suite(s, trials, seed));
  for (double eps : {0.1, 0.25, 0.5, 0.9}) out.push_back(reshetnyak_suite(s, trials, eps, seed));
  out.push_back(geodesic_suite(s, trials, seed));
  out.push_back(metric_suite(s, trials, seed));
  // hull suites are the slow ones; 10^3 instances is their target count
  const std::size_t hull_trials = std::min<std::size_t>(trials, 1000);
  out.push_back(projection_suite(ns.space, hull_trials, seed));
  out.push_back(nested_circum_suite(ns.space, hull_trials, seed));
  out.push_back(bary_contraction_suite(s, trials, seed));
  out.push_back(bary_strengthened_suite(s, trials, seed));
  if (s.kind() == SpaceKind::euclidean) out.push_back(euclidean_mean_suite(s, trials, seed));
  for (auto& c : out) c.name = ns.label + "/" + c.name;
  return out;
}

}  // namespace hadamard
