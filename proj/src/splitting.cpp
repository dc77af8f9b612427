#include "hadamard/splitting.hpp"

#include <algorithm>
#include <cmath>

namespace hadamard {

namespace {

double sample_hausdorff(const ConvexBody& a, const ConvexBody& b) {
  const ModelSpace& s = *a.space;
  auto one_side = [&](const ConvexBody& p, const ConvexBody& q) {
    double worst = 0.0;
    for (const auto& x : p.samples) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : q.samples) best = std::min(best, s.coord_distance(x.coords, y.coords));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_side(a, b), one_side(b, a));
}

double diameter_of(const ModelSpace& s, const std::vector<Point>& pts) {
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, s.distance(pts[i], pts[j]));
  }
  return d;
}

std::vector<Point> orbit(const IsometryRep& rep, const std::vector<Word>& ball, const Point& x) {
  std::vector<Point> out;
  for (const auto& w : ball) out.push_back(rep.act(w, x));
  return out;
}

ConvexBody translate(const ConvexBody& body, const Isometry& g) {
  ConvexBody out{body.space, {}, body.closure_depth, {}};
  for (const auto& p : body.generators) out.generators.push_back(g.apply(p));
  for (const auto& p : body.samples) out.samples.push_back(g.apply(p));
  return out;
}

double max_displacement(const std::vector<Isometry>& maps, const Point& y) {
  double d = 0.0;
  for (const auto& g : maps) d = std::max(d, displacement(g, y));
  return d;
}

}  // namespace

ProductAction::ProductAction(std::vector<RepPtr> reps) : reps_(std::move(reps)) {
  if (reps_.size() < 2) throw ConstructionError("a product action needs at least two factors");
  for (const auto& r : reps_) {
    if (!r || r->space().get() != reps_.front()->space().get()) {
      throw ConstructionError("factor groups act on different spaces");
    }
  }
  const ModelSpace& s = *space();
  Rng rng(0xc0ff);
  std::vector<Point> probes{s.base_point()};
  for (int k = 0; k < 8; ++k) probes.push_back(s.random_point(rng, probes[0], 3.0));
  for (std::size_t a = 0; a < reps_.size(); ++a) {
    for (std::size_t b = a + 1; b < reps_.size(); ++b) {
      for (const auto& g : reps_[a]->generators()) {
        for (const auto& h : reps_[b]->generators()) {
          for (const auto& x : probes) {
            const double d = s.distance(g.map.apply(h.map.apply(x)), h.map.apply(g.map.apply(x)));
            commutation_residual_ = std::max(commutation_residual_, d);
          }
        }
      }
    }
  }
  if (commutation_residual_ > 1e-9) {
    throw ConstructionError("generators of distinct factors do not commute (residual " +
                            std::to_string(commutation_residual_) + ")");
  }
}

MinimalSetResult MinimalSetResult::from_body(ConvexBody body) {
  MinimalSetResult r;
  r.body = std::move(body);
  return r;
}

MinimalSetResult minimal_invariant_set(const ProductAction& action, std::size_t factor,
                                       const Point& seed, const MinimalSetOptions& options) {
  if (factor >= action.factor_count()) throw DomainError("factor index out of range");
  const ModelSpace& s = *action.space();
  s.require_member(seed);
  const IsometryRep& rep = action.rep(factor);
  const int radius = std::min(options.ball_radius, rep.word_cap());
  const auto ball = rep.word_ball(radius);
  const auto half_ball = rep.word_ball(std::max(1, radius / 2));

  std::vector<Point> samples = orbit(rep, ball, seed);
  const double diam_full = diameter_of(s, samples);
  const double diam_half = diameter_of(s, orbit(rep, half_ball, seed));
  if (diam_full > options.orbit_cap || diam_full > 1.5 * diam_half + 1e-9) {
    throw EvanescenceDiagnostic("orbit of the seed under factor " + std::to_string(factor) +
                                " keeps growing with the word length; the action may be "
                                "evanescent instead of having a minimal bounded set");
  }

  std::vector<Isometry> own;
  for (const auto& w : ball) own.push_back(rep.evaluate(w));
  std::vector<Isometry> others;
  for (std::size_t j = 0; j < action.factor_count(); ++j) {
    if (j == factor) continue;
    for (const auto& g : action.rep(j).generators()) others.push_back(g.map);
  }

  MinimalSetResult result;
  double prev_diam = std::numeric_limits<double>::infinity();
  for (int round = 0; round < options.max_rounds; ++round) {
    // close under the factor generators, take a hull and add its circumcentre
    std::vector<Point> closed = samples;
    for (const auto& p : samples) {
      for (const auto& g : rep.generators()) closed.push_back(g.map.apply(p));
    }
    ConvexBody body = dyadic_hull_within_cap(action.space(), closed, options.hull_depth,
                                             options.sample_cap);
    body.samples.push_back(circumcenter(s, body.generators).center);

    // shrink to sublevel sets of invariant convex functions
    std::vector<double> phi(body.samples.size());
    double phi_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < body.samples.size(); ++k) {
      phi[k] = max_displacement(own, body.samples[k]);
      phi_min = std::min(phi_min, phi[k]);
    }
    double slack = options.slack * (1.0 + phi_min);
    std::vector<Point> kept;
    for (int attempt = 0; attempt < 2 && kept.empty(); ++attempt, slack *= 2.0) {
      for (std::size_t k = 0; k < body.samples.size(); ++k) {
        if (phi[k] <= phi_min + slack) kept.push_back(body.samples[k]);
      }
    }
    if (!others.empty() && kept.size() > 1) {
      std::vector<double> psi(kept.size());
      double psi_min = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < kept.size(); ++k) {
        psi[k] = max_displacement(others, kept[k]);
        psi_min = std::min(psi_min, psi[k]);
      }
      std::vector<Point> narrowed;
      for (std::size_t k = 0; k < kept.size(); ++k) {
        if (psi[k] <= psi_min + options.slack * (1.0 + psi_min)) narrowed.push_back(kept[k]);
      }
      kept = std::move(narrowed);
    }
    if (kept.empty()) {
      result.warnings.push_back("sublevel shrink emptied the samples; keeping the previous body");
      kept = samples;
    }
    samples = std::move(kept);
    const double diam = diameter_of(s, samples);
    result.shrink_log.push_back({round, samples.size(), diam, slack});
    if (std::abs(diam - prev_diam) < 1e-6) break;
    prev_diam = diam;
  }

  result.body = dyadic_hull_within_cap(action.space(), samples, options.hull_depth,
                                       options.sample_cap);
  for (const auto& g : rep.generators()) {
    for (const auto& p : result.body.samples) {
      const Point q = g.map.apply(p);
      result.invariance_residual =
          std::max(result.invariance_residual, s.distance(project(result.body, q), q));
    }
  }
  for (const auto& g : others) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& p : result.body.samples) {
      const double d = displacement(g, p);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    result.oscillation = std::max(result.oscillation, hi - lo);
  }
  return result;
}

ParallelReport parallel_transport_check(const MinimalSetResult& c, const MinimalSetResult& cp) {
  const ModelSpace& s = *c.body.space;
  ParallelReport r;
  std::vector<Point> image;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  double sum = 0.0;
  for (const auto& x : c.body.samples) {
    const Point p = project(cp.body, x);
    const double d = s.distance(x, p);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
    sum += d;
    image.push_back(p);
  }
  r.oscillation = hi - lo;
  r.d0 = sum / static_cast<double>(c.body.samples.size());
  r.parallel = r.oscillation <= 1e-5;
  double worst = 0.0;
  const auto& xs = c.body.samples;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      worst = std::max(worst, std::abs(s.distance(image[i], image[j]) - s.distance(xs[i], xs[j])));
    }
  }
  r.isometry = make_defect(worst, 0.0);
  return r;
}

DefectReport holonomy_check(const MinimalSetResult& c1, const MinimalSetResult& c2,
                            const MinimalSetResult& c3) {
  const ModelSpace& s = *c1.body.space;
  double worst = 0.0;
  for (const auto& x : c1.body.samples) {
    const Point y = project(c1.body, project(c3.body, project(c2.body, x)));
    worst = std::max(worst, s.distance(y, x));
  }
  return make_defect(worst, 0.0);
}

SplittingResult build_splitting(const ProductAction& action, const std::vector<Point>& seeds,
                                const SplittingOptions& options) {
  if (action.factor_count() != 2) {
    throw DomainError("build_splitting handles two factors; split the groups recursively");
  }
  if (seeds.empty()) throw DomainError("no seeds");
  const ModelSpace& s = *action.space();
  const IsometryRep& g2 = action.rep(1);
  SplittingResult out;

  const auto ball2 = g2.word_ball(std::min(options.minimal.ball_radius, g2.word_cap()));
  auto add_component = [&](MinimalSetResult c) {
    for (const auto& existing : out.components) {
      if (sample_hausdorff(existing.body, c.body) < 1e-7) return;
    }
    if (static_cast<int>(out.components.size()) < options.max_components) {
      out.components.push_back(std::move(c));
    }
  };
  for (const auto& seed : seeds) {
    MinimalSetResult z = minimal_invariant_set(action, 0, seed, options.minimal);
    if (z.invariance_residual > 1e-5) {
      out.diagnostics.push_back("minimal set from a seed is not invariant (residual " +
                                std::to_string(z.invariance_residual) + ")");
    }
    for (const auto& w : ball2) {
      MinimalSetResult c = z;
      c.body = translate(z.body, g2.evaluate(w));
      add_component(std::move(c));
    }
  }
  const MinimalSetResult& z1 = out.components.front();

  for (std::size_t k = 1; k < out.components.size(); ++k) {
    const ParallelReport p = parallel_transport_check(z1, out.components[k]);
    if (!p.parallel) {
      out.diagnostics.push_back("component " + std::to_string(k) + " is not parallel to Z1");
    }
  }

  // star action of G2 on Z1
  for (const auto& g : g2.generators()) {
    for (const auto& z : z1.body.samples) {
      out.star_residual = std::max(out.star_residual, s.distance(project(z1.body, g.map.apply(z)), z));
    }
  }
  if (out.star_residual > 1e-5) {
    out.diagnostics.push_back("G2 star action on Z1 is not trivial; a nontrivial Clifford "
                              "translation would contradict the splitting");
  }

  const std::size_t m = std::min<std::size_t>(out.components.size(), 6);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      for (std::size_t c = 0; c < m; ++c) {
        const DefectReport h = holonomy_check(out.components[a], out.components[b], out.components[c]);
        out.holonomy_residual = std::max(out.holonomy_residual, h.lhs);
      }
    }
  }

  const IsometryRep& g1 = action.rep(0);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      for (const auto& x : out.components[a].body.samples) {
        for (const auto& g : g1.generators()) {
          const Point lhs = project(out.components[b].body, g.map.apply(x));
          const Point rhs = g.map.apply(project(out.components[b].body, x));
          out.equivariance_residual = std::max(out.equivariance_residual, s.distance(lhs, rhs));
        }
      }
    }
  }

  Rng rng(options.seed, 0x5917);
  const std::size_t nc = out.components.size();
  for (int t = 0; t < options.test_pairs; ++t) {
    const std::size_t a = rng.index(nc);
    const std::size_t b = rng.index(nc);
    const auto& ca = out.components[a].body.samples;
    const auto& cb = out.components[b].body.samples;
    const Point& x = ca[rng.index(ca.size())];
    const Point& xp = cb[rng.index(cb.size())];
    const double d = s.distance(x, xp);
    const double dp = s.distance(project(z1.body, x), project(z1.body, xp));
    const double dc = s.distance(x, project(out.components[b].body, x));
    out.pythagoras_residual = std::max(out.pythagoras_residual, std::abs(d * d - dp * dp - dc * dc));
  }
  return out;
}

std::pair<Point, std::size_t> splitting_map(const SplittingResult& result, const Point& x) {
  if (result.components.empty()) throw DomainError("empty splitting");
  const ModelSpace& s = *result.components.front().body.space;
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < result.components.size(); ++k) {
    const double d = s.distance(x, project(result.components[k].body, x));
    if (d < best_d) best_d = d, best = k;
  }
  return {project(result.components.front().body, x), best};
}

}  // namespace hadamard
