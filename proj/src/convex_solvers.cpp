#include "hadamard/convex_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace hadamard {

namespace {

using Coords = std::vector<Vector>;

Coords coords_of(std::span<const Point> points) {
  Coords out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.coords);
  return out;
}

Matrix sym_apply(const Matrix& s, double (*fn)(double)) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  const Vector l = es.eigenvalues().unaryExpr(fn);
  return es.eigenvectors() * l.asDiagonal() * es.eigenvectors().transpose();
}

double raw_value(const ModelSpace& s, const Coords& pts, const Vector& w, const Vector& x) {
  double v = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (w[i] == 0.0) continue;
    const double d = s.coord_distance(x, pts[i]);
    v += w[i] * d * d;
  }
  return v;
}

// x coth x, continuous at 0
double xcoth(double x) { return x < 1e-8 ? 1.0 : x / std::tanh(x); }

Vector karcher_hyperbolic(const HyperbolicSpace& h, const Coords& pts, const Vector& w,
                          const Vector* warm, int* iterations) {
  Vector x;
  if (warm) {
    x = *warm;
  } else {
    Vector m = Vector::Zero(pts[0].size());
    for (std::size_t i = 0; i < pts.size(); ++i) m += w[i] * pts[i];
    x = HyperbolicSpace::renormalize(m);
  }
  double last = std::numeric_limits<double>::infinity();
  int stalls = 0;
  int it = 0;
  for (; it < 1000; ++it) {
    Vector g = Vector::Zero(x.size());
    double lip = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (w[i] == 0.0) continue;
      const Vector v = h.log_map(x, pts[i]);
      g += w[i] * v;
      lip += w[i] * xcoth(std::sqrt(std::max(0.0, HyperbolicSpace::minkowski(v, v))));
    }
    const double gn = std::sqrt(std::max(0.0, HyperbolicSpace::minkowski(g, g)));
    if (gn < 1e-14) break;
    if (gn >= last) {
      if (++stalls >= 4) break;
    } else {
      stalls = 0;
    }
    last = std::min(last, gn);
    x = h.exp_map(x, (2.0 / (1.0 + lip)) * g);
  }
  if (iterations) *iterations = it;
  return x;
}

Vector karcher_spd(const SpdSpace& spd, const Coords& pts, const Vector& w, const Vector* warm,
                   int* iterations) {
  const int n = spd.n();
  Matrix a;
  if (warm) {
    a = spd.to_matrix(*warm);
  } else {
    Matrix l = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      l += w[i] * sym_apply(spd.to_matrix(pts[i]), [](double v) { return std::log(v); });
    }
    a = sym_apply(l, [](double v) { return std::exp(v); });
  }
  double last = std::numeric_limits<double>::infinity();
  int stalls = 0;
  int it = 0;
  for (; it < 1000; ++it) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    const Matrix half = es.operatorSqrt();
    const Matrix inv_half = es.operatorInverseSqrt();
    Matrix g = Matrix::Zero(n, n);
    double lip = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (w[i] == 0.0) continue;
      Matrix m = inv_half * spd.to_matrix(pts[i]) * inv_half;
      m = 0.5 * (m + m.transpose());
      const Matrix lg = sym_apply(m, [](double v) { return std::log(v); });
      g += w[i] * lg;
      lip += w[i] * xcoth(lg.norm() / std::sqrt(2.0));
    }
    const double gn = g.norm();
    if (gn < 1e-14) break;
    if (gn >= last) {
      if (++stalls >= 4) break;
    } else {
      stalls = 0;
    }
    last = std::min(last, gn);
    const Matrix step = (2.0 / (1.0 + lip)) * g;
    Matrix next = half * sym_apply(0.5 * (step + step.transpose()), [](double v) {
      return std::exp(v);
    }) * half;
    a = 0.5 * (next + next.transpose());
  }
  if (iterations) *iterations = it;
  return spd.to_coords(a);
}

// The objective restricted to an edge is a quadratic in the offset, so the
// minimizer is found exactly edge by edge.
Vector tree_barycenter(const MetricTree& tree, const Coords& pts, const Vector& w) {
  Vector best;
  double best_value = std::numeric_limits<double>::infinity();
  const auto& edges = tree.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& edge = edges[e];
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (w[i] == 0.0) continue;
      double c;
      if (static_cast<std::size_t>(std::lround(pts[i][0])) == e) {
        c = pts[i][1];
      } else {
        const double du = tree.coord_vertex_distance(pts[i], edge.u);
        const double dv = tree.coord_vertex_distance(pts[i], edge.v);
        c = du <= dv ? -du : edge.length + dv;
      }
      num += w[i] * c;
      den += w[i];
    }
    const double s = std::clamp(num / den, 0.0, edge.length);
    const Vector x = tree.coord_canonical(tree.edge_coords(static_cast<int>(e), s));
    const double value = raw_value(tree, pts, w, x);
    if (value < best_value) {
      best_value = value;
      best = x;
    }
  }
  return best;
}

Vector inductive_coords(const ModelSpace& s, const Coords& pts, const Vector& w, int sweeps) {
  Vector x;
  double acc = 0.0;
  for (int k = 0; k < sweeps; ++k) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (w[i] <= 0.0) continue;
      acc += w[i];
      x = x.size() == 0 ? pts[i] : s.coord_geodesic(x, pts[i], w[i] / acc);
    }
  }
  return x;
}

// Barycentre of raw payloads; `w` is nonnegative and sums to one.
Vector raw_barycenter(const ModelSpace& s, const Coords& pts, const Vector& w, const Vector* warm,
                      int* iterations = nullptr) {
  if (iterations) *iterations = 0;
  switch (s.kind()) {
    case SpaceKind::euclidean: {
      Vector m = Vector::Zero(pts[0].size());
      for (std::size_t i = 0; i < pts.size(); ++i) m += w[i] * pts[i];
      return m;
    }
    case SpaceKind::hyperbolic:
      return karcher_hyperbolic(static_cast<const HyperbolicSpace&>(s), pts, w, warm, iterations);
    case SpaceKind::spd:
      return karcher_spd(static_cast<const SpdSpace&>(s), pts, w, warm, iterations);
    case SpaceKind::tree:
      return tree_barycenter(static_cast<const MetricTree&>(s), pts, w);
    case SpaceKind::product:
    case SpaceKind::l2: {
      const auto& p = dynamic_cast<const ProductSpace&>(s);
      Vector out(s.coord_size());
      for (std::size_t f = 0; f < p.factor_count(); ++f) {
        Coords sub;
        sub.reserve(pts.size());
        for (const auto& x : pts) sub.push_back(p.coord_component(f, x));
        const auto size = p.factor(f)->coord_size();
        Vector warm_sub;
        if (warm) warm_sub = warm->segment(p.offset(f), size);
        int it = 0;
        out.segment(p.offset(f), size) =
            raw_barycenter(*p.factor(f), sub, w, warm ? &warm_sub : nullptr, &it);
        if (iterations) *iterations = std::max(*iterations, it);
      }
      return out;
    }
  }
  return inductive_coords(s, pts, w, 200);
}

void dedupe(Coords& pts) {
  std::sort(pts.begin(), pts.end(), [](const Vector& a, const Vector& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                        b.data() + b.size());
  });
  pts.erase(std::unique(pts.begin(), pts.end(), [](const Vector& a, const Vector& b) {
              return a == b;
            }),
            pts.end());
}

double radius_at(const ModelSpace& s, const Coords& pts, const Vector& c, std::size_t* far = nullptr,
                 std::size_t* second = nullptr) {
  double r1 = -1.0;
  double r2 = -1.0;
  std::size_t i1 = 0;
  std::size_t i2 = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = s.coord_distance(c, pts[i]);
    if (d > r1) {
      r2 = r1;
      i2 = i1;
      r1 = d;
      i1 = i;
    } else if (d > r2) {
      r2 = d;
      i2 = i;
    }
  }
  if (far) *far = i1;
  if (second) *second = i2;
  return r1;
}

// Move a fraction beta toward the farthest point (or toward the midpoint of
// the two farthest), halving beta when neither move helps.
Vector circum_stepping(const ModelSpace& s, const Coords& pts, Vector c, int max_iter) {
  std::size_t far = 0;
  std::size_t second = 0;
  double r = radius_at(s, pts, c, &far, &second);
  double beta = 0.5;
  for (int it = 0; it < max_iter && beta > 1e-13; ++it) {
    const Vector toward_far = s.coord_geodesic(c, pts[far], beta);
    const Vector mid = s.coord_geodesic(pts[far], pts[second], 0.5);
    const Vector toward_mid = s.coord_geodesic(c, mid, beta);
    std::size_t f1 = 0, s1 = 0, f2 = 0, s2 = 0;
    const double r1 = radius_at(s, pts, toward_far, &f1, &s1);
    const double r2 = radius_at(s, pts, toward_mid, &f2, &s2);
    if (std::min(r1, r2) < r) {
      if (r1 <= r2) {
        c = toward_far, r = r1, far = f1, second = s1;
      } else {
        c = toward_mid, r = r2, far = f2, second = s2;
      }
      beta = std::min(0.5, beta * 1.5);
    } else {
      beta *= 0.5;
    }
  }
  return c;
}

struct DualState {
  Vector center;
  double radius = 0.0;
  double lower = 0.0;
  bool ok = false;
};

// Active-set Newton on the dual: find weights w on an active set such that the
// barycentre of w is equidistant from the active points and no other point is
// farther. Such a barycentre is the circumcentre.
DualState circum_dual(const ModelSpace& s, const Coords& pts, const Vector& start, double r_start) {
  DualState out;
  const std::size_t n = pts.size();
  const double scale = 1.0 + r_start * r_start;
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < n; ++i) {
    if (s.coord_distance(start, pts[i]) >= r_start * (1.0 - 1e-3) - 1e-12) active.push_back(i);
  }
  Vector wa = Vector::Constant(static_cast<Eigen::Index>(active.size()), 1.0 / active.size());
  Vector b = start;

  auto full_weights = [&](const Vector& wact) {
    Vector w = Vector::Zero(static_cast<Eigen::Index>(n));
    const double total = wact.sum();
    for (std::size_t k = 0; k < active.size(); ++k) w[active[k]] = wact[k] / total;
    return w;
  };
  auto residual = [&](const Vector& bc, const Vector& wact) {
    const auto m = static_cast<Eigen::Index>(active.size());
    Vector f(m);
    const double d0 = s.coord_distance(bc, pts[active[0]]);
    for (Eigen::Index k = 1; k < m; ++k) {
      const double dk = s.coord_distance(bc, pts[active[k]]);
      f[k - 1] = dk * dk - d0 * d0;
    }
    f[m - 1] = wact.sum() - 1.0;
    return f;
  };

  b = raw_barycenter(s, pts, full_weights(wa), nullptr);
  for (int outer = 0; outer < 60; ++outer) {
    for (int inner = 0; inner < 40; ++inner) {
      const auto m = static_cast<Eigen::Index>(active.size());
      const Vector f = residual(b, wa);
      if (f.head(m - 1).cwiseAbs().maxCoeff() <= 1e-14 * scale && std::abs(f[m - 1]) < 1e-14) {
        break;
      }
      if (m == 1) {
        wa[0] = 1.0;
        b = pts[active[0]];
        break;
      }
      Matrix jac(m, m);
      const double h = 1e-7;
      for (Eigen::Index j = 0; j < m; ++j) {
        Vector wp = wa;
        wp[j] += h;
        const Vector bp = raw_barycenter(s, pts, full_weights(wp), &b);
        jac.col(j) = (residual(bp, wp) - f) / h;
      }
      const Vector delta = Eigen::CompleteOrthogonalDecomposition<Matrix>(jac).solve(-f);
      double alpha = 1.0;
      Eigen::Index blocking = -1;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (delta[j] < 0.0 && wa[j] + alpha * delta[j] < 0.0) {
          alpha = -wa[j] / delta[j];
          blocking = j;
        }
      }
      wa += alpha * delta;
      if (blocking >= 0) {
        active.erase(active.begin() + blocking);
        Vector shrunk(m - 1);
        for (Eigen::Index j = 0, k = 0; j < m; ++j) {
          if (j != blocking) shrunk[k++] = std::max(0.0, wa[j]);
        }
        wa = shrunk / shrunk.sum();
      }
      b = raw_barycenter(s, pts, full_weights(wa), &b);
      if (!b.allFinite()) return out;
    }
    // add the worst violator, if any
    double r_act = 0.0;
    for (std::size_t k : active) r_act = std::max(r_act, s.coord_distance(b, pts[k]));
    std::size_t worst = n;
    double worst_d = r_act + 1e-12 * (1.0 + r_act);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = s.coord_distance(b, pts[i]);
      if (d > worst_d && std::find(active.begin(), active.end(), i) == active.end()) {
        worst_d = d;
        worst = i;
      }
    }
    if (worst == n) break;
    active.push_back(worst);
    Vector grown(wa.size() + 1);
    grown << wa, 0.0;
    wa = grown;
  }
  const Vector w = full_weights(wa);
  out.center = b;
  out.radius = radius_at(s, pts, b);
  out.lower = std::sqrt(std::max(0.0, raw_value(s, pts, w, b)));
  out.ok = out.center.allFinite();
  return out;
}

double golden_minimize(const std::function<double(double)>& f, double* best_t, double tol = 1e-10) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.0, b = 1.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d, d = c, fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  *best_t = 0.5 * (a + b);
  return f(*best_t);
}

}  // namespace

double ConvexBody::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      d = std::max(d, space->coord_distance(samples[i].coords, samples[j].coords));
    }
  }
  return d;
}

ConvexBody dyadic_hull(SpacePtr space, std::vector<Point> points, int depth, std::size_t cap) {
  if (points.empty()) throw DomainError("dyadic hull of an empty set");
  if (depth < 0) throw DomainError("negative hull depth");
  for (const auto& p : points) space->require_member(p);

  auto key = [](const Vector& v) {
    std::vector<long long> k(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) k[i] = std::llround(v[i] * 1e10);
    return k;
  };
  ConvexBody body{space, points, depth, {}};
  std::map<std::vector<long long>, std::size_t> seen;
  for (const auto& p : points) {
    if (seen.emplace(key(p.coords), body.samples.size()).second) body.samples.push_back(p);
  }
  if (body.samples.size() > cap) {
    throw SampleCapError("dyadic hull exceeds the sample cap; lower the depth");
  }
  for (int level = 0; level < depth; ++level) {
    const std::size_t n = body.samples.size();
    if (n * (n - 1) / 2 + n > 4 * cap) {
      throw SampleCapError("dyadic hull at depth " + std::to_string(depth) +
                           " exceeds the sample cap; lower the depth");
    }
    std::vector<Point> next = body.samples;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        Vector m = space->coord_geodesic(body.samples[i].coords, body.samples[j].coords, 0.5);
        if (seen.emplace(key(m), next.size()).second) {
          next.push_back(space->wrap(std::move(m)));
          if (next.size() > cap) {
            throw SampleCapError("dyadic hull at depth " + std::to_string(depth) +
                                 " exceeds the sample cap; lower the depth");
          }
        }
      }
    }
    const bool stable = next.size() == n;
    body.samples = std::move(next);
    if (stable) break;
  }
  return body;
}

ConvexBody dyadic_hull_within_cap(SpacePtr space, std::vector<Point> points, int max_depth,
                                  std::size_t cap) {
  for (int depth = max_depth; depth > 0; --depth) {
    try {
      return dyadic_hull(space, points, depth, cap);
    } catch (const SampleCapError&) {
    }
  }
  return dyadic_hull(space, std::move(points), 0, cap);
}

Point project(const ConvexBody& body, const Point& x) {
  const ModelSpace& s = *body.space;
  s.require_member(x);
  const auto& samples = body.samples;
  std::vector<double> dist(samples.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    dist[i] = s.coord_distance(x.coords, samples[i].coords);
    if (dist[i] < dist[best]) best = i;
  }
  Vector p = samples[best].coords;
  double dp = dist[best];
  if (dp < 1e-14 || samples.size() == 1) return samples[best];

  // edges of the hull lie on geodesics between generators, where descent
  // toward samples only zig-zags
  const auto& gens = body.generators;
  const bool few = gens.size() <= 8;
  if (few) {
    for (std::size_t i = 0; i < gens.size(); ++i) {
      for (std::size_t j = i + 1; j < gens.size(); ++j) {
        if (s.coord_distance(gens[i].coords, gens[j].coords) < 1e-15) continue;
        const auto path = s.coord_geodesic_path(gens[i].coords, gens[j].coords);
        double t = 0.0;
        const double v =
            golden_minimize([&](double tt) { return s.coord_distance(x.coords, path(tt)); }, &t);
        if (v < dp) {
          p = path(t);
          dp = v;
        }
      }
    }
    // a segment, or a subtree: the union of those geodesics is the whole hull
    if (gens.size() <= 2 || s.kind() == SpaceKind::tree) return s.wrap(std::move(p));
  }

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t k = std::min<std::size_t>(32, samples.size());
  std::partial_sort(order.begin(), order.begin() + k, order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
                    });
  std::vector<Vector> targets;
  for (std::size_t i = 0; i < k; ++i) targets.push_back(samples[order[i]].coords);
  for (const auto& g : body.generators) targets.push_back(g.coords);

  auto along = [&](const std::function<Vector(double)>& path, double* t) {
    return golden_minimize([&](double tt) { return s.coord_distance(x.coords, path(tt)); }, t);
  };
  std::vector<std::size_t> descending;
  int pair_rounds = 0;
  for (int pass = 0; pass < 200; ++pass) {
    const double start = dp;
    descending.clear();
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const Vector& q = targets[i];
      if (s.coord_distance(p, q) < 1e-15) continue;
      const auto path = s.coord_geodesic_path(p, q);
      // convex along the geodesic, so no descent at 0 means no gain anywhere
      if (s.coord_distance(x.coords, path(1e-7)) >= dp) continue;
      descending.push_back(i);
      double t = 0.0;
      const double v = along(path, &t);
      if (v < dp - 1e-16) {
        p = path(t);
        dp = v;
      }
    }
    if (!few || pair_rounds >= 8 || start - dp >= 0.1 * start) {
      if (start - dp < 1e-13) break;
      continue;
    }
    // slow progress: the best direction lies between two target directions,
    // so aim at points of the geodesic joining a descending target to another
    ++pair_rounds;
    Vector best_p = p;
    double best_d = dp;
    for (std::size_t a : descending) {
      for (std::size_t b = 0; b < targets.size(); ++b) {
        if (b == a || s.coord_distance(targets[a], targets[b]) < 1e-15) continue;
        const auto edge = s.coord_geodesic_path(targets[a], targets[b]);
        double sv = 0.0;
        const double v = golden_minimize(
            [&](double ss) {
              const Vector r = edge(ss);
              if (s.coord_distance(p, r) < 1e-15) return dp;
              const auto path = s.coord_geodesic_path(p, r);
              double t = 0.0;
              return along(path, &t);
            },
            &sv, 1e-8);
        if (v < best_d - 1e-16) {
          const Vector r = edge(sv);
          const auto path = s.coord_geodesic_path(p, r);
          double t = 0.0;
          along(path, &t);
          best_p = path(t);
          best_d = s.coord_distance(x.coords, best_p);
        }
      }
    }
    if (best_d < dp - 1e-16) {
      p = best_p;
      dp = best_d;
    }
    if (start - dp < 1e-13 || dp < 1e-14) break;
  }
  return s.wrap(std::move(p));
}

CircumResult circumcenter(const ModelSpace& space, std::span<const Point> points,
                          const CircumOptions& options) {
  if (points.empty()) throw DomainError("circumcentre of an empty set");
  for (const auto& p : points) space.require_member(p);
  Coords pts = coords_of(points);
  dedupe(pts);
  if (pts.size() == 1) return CircumResult{space.wrap(pts[0]), 0.0, 0.0};

  if (space.kind() == SpaceKind::tree) {
    // the circumcentre of a subset of a tree is the midpoint of a diametral pair
    double diam = -1.0;
    std::size_t a = 0, b = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        const double d = space.coord_distance(pts[i], pts[j]);
        if (d > diam) diam = d, a = i, b = j;
      }
    }
    const Vector c = space.coord_geodesic(pts[a], pts[b], 0.5);
    const double r = radius_at(space, pts, c);
    return CircumResult{space.wrap(c), r, 0.5 * diam};
  }

  Rng rng(options.seed, 0xc1c);
  Vector c = circum_stepping(space, pts, pts[rng.index(pts.size())], options.max_iter);
  double r = radius_at(space, pts, c);
  double lower = 0.0;
  const DualState dual = circum_dual(space, pts, c, r);
  if (dual.ok && dual.radius <= r + 1e-12 * (1.0 + r)) {
    c = dual.center;
    r = dual.radius;
    lower = std::min(dual.lower, r);
  }
  return CircumResult{space.wrap(space.coord_canonical(c)), r, lower};
}

double circumcenter_improvement(const ModelSpace& space, std::span<const Point> points,
                                const CircumResult& result, Rng& rng, int samples) {
  const Coords pts = coords_of(points);
  const Vector& c = result.center.coords;
  const double r = radius_at(space, pts, c);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : pts) {
    const double d = space.coord_distance(c, p);
    if (d < 1e-15) continue;
    for (double step : {1e-2, 1e-4, 1e-6}) {
      const Vector q = space.coord_geodesic(c, p, std::min(1.0, step / d));
      best = std::max(best, r - radius_at(space, pts, q));
    }
  }
  for (int k = 0; k < samples; ++k) {
    const double scale = std::pow(10.0, -2.0 - 4.0 * k / std::max(1, samples - 1));
    const Vector q = space.coord_random(rng, c, scale);
    best = std::max(best, r - radius_at(space, pts, q));
  }
  return best;
}

DefectReport nested_circum_check(const ConvexBody& e, const ConvexBody& ep) {
  if (e.space.get() != ep.space.get()) throw DomainError("hulls live in different spaces");
  const ModelSpace& s = *e.space;
  // hull(E) is inside hull(Ep) once the generators of E are
  for (const auto& g : e.generators) {
    const double res = s.distance(project(ep, g), g);
    if (res > 1e-6) {
      throw PreconditionError("E is not contained in Ep (projection residual " +
                              std::to_string(res) + ")");
    }
  }
  // a set, its hull and any sample set between them share the circumcentre
  const CircumResult c = circumcenter(s, e.generators);
  const CircumResult cp = circumcenter(s, ep.generators);
  const double gap = std::max(0.0, cp.radius * cp.radius - c.radius * c.radius);
  return make_defect(s.distance(cp.center, c.center), std::sqrt(2.0) * std::sqrt(gap));
}

double weighted_sq_sum(const ModelSpace& space, std::span<const Point> points,
                       std::span<const double> weights, const Point& x) {
  double v = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = space.distance(x, points[i]);
    v += weights[i] * d * d;
  }
  return v;
}

BarycenterResult barycenter(const ModelSpace& space, std::span<const Point> points,
                            std::span<const double> weights) {
  if (points.empty()) throw DomainError("barycentre of an empty family");
  if (points.size() != weights.size()) throw DomainError("weights and points differ in length");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw DomainError("negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("weights do not sum to 1");
  for (const auto& p : points) space.require_member(p);
  const Vector w = Eigen::Map<const Vector>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  int iterations = 0;
  const Coords pts = coords_of(points);
  Point x = space.wrap(space.coord_canonical(raw_barycenter(space, pts, w, nullptr, &iterations)));
  return BarycenterResult{x, weighted_sq_sum(space, points, weights, x), iterations};
}

Point inductive_mean(const ModelSpace& space, std::span<const Point> points,
                     std::span<const double> weights, int sweeps) {
  if (points.empty() || points.size() != weights.size()) {
    throw DomainError("inductive mean needs matching nonempty points and weights");
  }
  for (const auto& p : points) space.require_member(p);
  const Vector w = Eigen::Map<const Vector>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  return space.wrap(inductive_coords(space, coords_of(points), w, sweeps));
}

FixedPointResult fixed_point_nonexpanding(const ModelSpace& space, const SelfMap& f,
                                          const Point& x0, const FixedPointOptions& options) {
  space.require_member(x0);
  Rng rng(options.seed, 0xf1f);
  const Point fx0 = f(x0);
  const double scale = std::max(1.0, 2.0 * space.distance(x0, fx0));
  for (int k = 0; k < options.lipschitz_samples; ++k) {
    const Point a = k == 0 ? x0 : space.random_point(rng, x0, scale);
    const Point b = space.random_point(rng, x0, scale);
    const double d = space.distance(a, b);
    if (space.distance(f(a), f(b)) > d + 1e-9 * (1.0 + d)) {
      throw PreconditionError("map is expanding on a sampled pair");
    }
  }

  std::vector<Point> window{x0};
  while (window.size() < options.window) window.push_back(f(window.back()));
  Point prev = x0;
  for (int n = 0; n < options.max_iter; ++n) {
    if (space.distance(x0, window.back()) > options.diameter_cap) {
      throw NoFixedPointError("orbit leaves every ball of radius " +
                              std::to_string(options.diameter_cap) + "; no fixed point");
    }
    CircumOptions co;
    co.seed = options.seed;
    const Point c = circumcenter(space, window, co).center;
    const double residual = space.distance(f(c), c);
    const double step = space.distance(c, prev);
    if (residual <= options.tol && (n == 0 || step < options.tol)) {
      return FixedPointResult{c, n + 1, residual};
    }
    prev = c;
    window.erase(window.begin());
    window.push_back(f(window.back()));
  }
  throw ConvergenceError("fixed-point iteration exceeded max_iter", prev);
}

}  // namespace hadamard
