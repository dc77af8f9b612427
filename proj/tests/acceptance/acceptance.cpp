// Prints one PASS/FAIL line per acceptance criterion; exits 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "hadamard/convex_solvers.hpp"
#include "hadamard/isometry.hpp"
#include "hadamard/l2_induction.hpp"
#include "hadamard/model_spaces.hpp"
#include "hadamard/random.hpp"
#include "hadamard/scenario.hpp"
#include "hadamard/suites.hpp"
#include "json.hpp"

using namespace hadamard;
using json = nlohmann::json;

namespace {

struct Outcome {
  bool passed = true;
  std::string summary;
};

// Worst margin over a list of checks, where margin = defect + tolerance.
struct Tally {
  bool passed = true;
  double worst = INFINITY;
  std::string worst_name;
  std::size_t instances = 0;

  void add(const std::string& name, double defect, double tolerance, std::size_t trials) {
    instances += trials;
    if (defect < -tolerance) passed = false;
    if (defect + tolerance < worst) {
      worst = defect + tolerance;
      worst_name = name + " defect=" + fmt(defect) + " tol=" + fmt(tolerance);
    }
  }
  void add(const std::string& prefix, const Check& c) { add(prefix + c.name, c.defect, c.tolerance, c.trials); }
  void add(const CheckRecord& r) { add(r.name, r.defect, r.tolerance, r.trials); }

  Outcome outcome() const {
    return {passed, std::to_string(instances) + " instances, tightest: " + worst_name};
  }

  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v + 0.0);
    return buf;
  }
};

Report run(const json& scenario) { return run_scenario_text(scenario.dump()); }

Report run_file(const std::string& name) {
  return run_scenario_file(std::string(HADAMARD_SCENARIO_DIR) + "/" + name);
}

const CheckRecord* find(const Report& r, const std::string& name) {
  for (const auto& rec : r.records) {
    if (rec.name == name) return &rec;
  }
  return nullptr;
}

void require_records(Tally& t, const Report& r, const std::vector<std::string>& names) {
  for (const auto& n : names) {
    const CheckRecord* rec = find(r, n);
    if (!rec) {
      t.add(r.scenario + ": missing " + n, -INFINITY, 0.0, 0);
    } else {
      t.add(r.scenario + ": " + rec->name, rec->defect, rec->tolerance, rec->trials);
    }
  }
}

Outcome cat0_certificate() {
  Tally t;
  for (const auto& s : standard_spaces()) {
    t.add(s.label + "/", cn_suite(*s.space, 10000, 1));
    if (s.space->kind() == SpaceKind::euclidean) {
      t.add(s.label + "/", cn_equality_suite(*s.space, 10000, 2));
    }
  }
  return t.outcome();
}

Outcome reshetnyak() {
  Tally t;
  for (const auto& s : standard_spaces()) {
    for (double eps : {0.1, 0.25, 0.5, 0.9}) t.add(s.label + "/", reshetnyak_suite(*s.space, 1000, eps, 3));
  }
  return t.outcome();
}

Outcome nested_circumcentres() {
  Tally t;
  for (const auto& s : standard_spaces()) t.add(s.label + "/", nested_circum_suite(s.space, 1000, 4));
  return t.outcome();
}

Outcome barycentres() {
  Tally t;
  for (const auto& s : standard_spaces()) {
    t.add(s.label + "/", bary_contraction_suite(*s.space, 1000, 5));
    t.add(s.label + "/", bary_strengthened_suite(*s.space, 1000, 6));
    if (s.space->kind() == SpaceKind::euclidean) t.add(s.label + "/", euclidean_mean_suite(*s.space, 1000, 7));
  }
  return t.outcome();
}

Outcome rotation_fixed_point() {
  const SpacePtr r2 = make_euclidean(2);
  Vector center(2), start(2);
  center << 3.0, 4.0;
  start << -2.0, 7.5;
  const Isometry rot = euclidean_rotation(r2, 1.0, center);
  const Point x0 = r2->make_point(start);
  const FixedPointResult r = fixed_point_nonexpanding(*r2, [&](const Point& p) { return rot.apply(p); }, x0);
  const double err = (r.point.coords - center).norm();
  Outcome o;
  o.passed = err <= 1e-6 && r.iterations <= 500;
  o.summary = "distance to (3,4) " + Tally::fmt(err) + " after " + std::to_string(r.iterations) + " iterations";
  return o;
}

Outcome l2_structure() {
  Tally t;
  const SpacePtr h2 = make_hyperbolic(2);
  const SpacePtr tree = standard_space("tree_star");
  const SpacePtr target = standard_space("hyperbolic2_x_r");
  double mass_gap = 0.0, recover_gap = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Rng rng(11, 0, static_cast<std::uint64_t>(i));
    const SpacePtr x = (i % 2 == 0) ? h2 : tree;
    const std::size_t atoms = 1 + rng.index(8);
    std::vector<double> w(atoms);
    for (auto& v : w) v = rng.uniform(0.1, 1.0);
    double sum = 0.0;
    for (double v : w) sum += v;
    for (auto& v : w) v /= sum;
    const L2Ptr l2 = make_l2(std::make_shared<FiniteMeasureSpace>(std::vector<std::string>{}, w), x);
    std::vector<Point> fv, gv;
    for (std::size_t k = 0; k < atoms; ++k) {
      fv.push_back(x->random_point(rng, x->base_point(), 2.0));
      gv.push_back(x->random_point(rng, x->base_point(), 2.0));
    }
    const L2Map f = L2Map::from_values(l2, fv);
    const L2Map g = L2Map::from_values(l2, gv);
    if (l2_distance(f, g) < 1e-6) continue;
    const double s = rng.uniform(0.2, 1.0);
    const L2GeodesicPoint m = l2_geodesic(f, g, s);
    mass_gap = std::max(mass_gap, std::abs(m.alpha.mass() - 1.0));
    // the sub-geodesic [f, m] has the same speeds
    const SemiDensity back = decompose_geodesic(f, m.map);
    recover_gap = std::max(recover_gap, (back.alpha - m.alpha.alpha).cwiseAbs().maxCoeff());
  }
  t.add("geodesic mass", -mass_gap, 1e-8, 1000);
  t.add("geodesic round-trip", -recover_gap, 1e-8, 1000);

  // flat strips in L²(F, H² x R): shift one side along the R factor per atom
  double alpha = 0.0;
  for (int i = 0; i < 100; ++i) {
    Rng rng(12, 0, static_cast<std::uint64_t>(i));
    const std::size_t atoms = 1 + rng.index(6);
    const L2Ptr l2 = make_l2(FiniteMeasureSpace::uniform(atoms), target);
    std::vector<Point> a1, b1, a2, b2;
    for (std::size_t k = 0; k < atoms; ++k) {
      const Point a = target->random_point(rng, target->base_point(), 2.0);
      const Point b = target->random_point(rng, target->base_point(), 2.0);
      const double shift = rng.uniform(-2.0, 2.0);
      auto moved = [&](const Point& p) {
        Vector c = p.coords;
        c[c.size() - 1] += shift;
        return target->make_point(c);
      };
      a1.push_back(a);
      b1.push_back(b);
      a2.push_back(moved(a));
      b2.push_back(moved(b));
    }
    const RectangleReport r = rectangle_check(L2Map::from_values(l2, a1), L2Map::from_values(l2, b1),
                                              L2Map::from_values(l2, a2), L2Map::from_values(l2, b2));
    for (const auto& d : r.per_atom) alpha = std::max(alpha, -d.defect);
  }
  t.add("rectangle per-atom agreement", -alpha, 1e-6, 100);
  return t.outcome();
}

json induce_scenario(int n) {
  return {{"schema_version", 1},
          {"name", "induce-N" + std::to_string(n)},
          {"seed", 8},
          {"space", {{"type", "euclidean"}, {"dim", 1}}},
          {"task", "induce"},
          {"params", {{"N", n}, {"gamma", {{"type", "translation"}, {"vector", {1}}}}, {"h_max", 3}, {"trials", 32}}}};
}

Outcome induction() {
  Tally t;
  for (int n : {8, 64}) require_records(t, run(induce_scenario(n)), {"induce_isometric", "induce_composition"});
  const json sqint = {{"schema_version", 1},
                      {"name", "sqint-refinement"},
                      {"seed", 0},
                      {"space", {{"type", "euclidean"}, {"dim", 1}}},
                      {"task", "sqint"},
                      {"params", {{"N", 64}, {"refine_N", 128}, {"g", {0, 0.5, 1, 2.5, -1.25, 3}}}}};
  require_records(t, run(sqint), {"sqint_finite", "sqint_identity_zero", "sqint_refinement"});
  return t.outcome();
}

Outcome averaging() {
  Tally t;
  const std::vector<std::vector<double>> sets = {{0.25}, {0.0, 0.5}, {0.0, 0.25, 0.5, 0.75}};
  const std::vector<json> targets = {
      {{"space", {{"type", "euclidean"}, {"dim", 2}}}, {"gamma", {{"type", "rotation"}, {"angle", 0.7}}}},
      {{"space", {{"type", "hyperbolic"}, {"dim", 2}}}, {"gamma", {{"type", "hyperbolic_rotation"}, {"angle", 0.7}}}}};
  for (const auto& target : targets) {
    for (const auto& shifts : sets) {
      const json s = {{"schema_version", 1},
                      {"name", "average-" + std::to_string(shifts.size())},
                      {"seed", 9},
                      {"space", target["space"]},
                      {"task", "average"},
                      {"params", {{"N", 8}, {"gamma", target["gamma"]}, {"shifts", shifts}, {"trials", 1000}}}};
      require_records(t, run(s), {"average_nonexpansion"});
    }
  }
  return t.outcome();
}

Outcome splitting() {
  Tally t;
  for (const char* f : {"split_c4_c4.json", "split_tree_line.json"}) {
    require_records(t, run_file(f), {"split_pythagoras", "split_holonomy", "split_star"});
  }
  return t.outcome();
}

Outcome evanescence() {
  Tally t;
  require_records(t, run_file("evanescence_translation.json"), {"evanescence_verdict"});
  require_records(t, run_file("evanescence_rotation.json"), {"evanescence_verdict", "evanescence_lambda"});
  require_records(t, run_file("evanescence_product.json"), {"evanescence_verdict"});
  return t.outcome();
}

Outcome lattice() {
  Tally t;
  require_records(t, run_file("lattice_sqrt2.json"), {"lattice_isometric", "lattice_projection_density"});
  return t.outcome();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"CN inequality on all model spaces, Euclidean equality", cat0_certificate},
      {"Reshetnyak quadrilateral inequality", reshetnyak},
      {"nested circumcentre bound", nested_circumcentres},
      {"barycentre inequalities and Euclidean mean", barycentres},
      {"fixed point of a plane rotation", rotation_fixed_point},
      {"L2 geodesic speeds and flat rectangles", l2_structure},
      {"induced action of Z in R", induction},
      {"commensurator averaging non-expansion", averaging},
      {"splitting pipeline residuals", splitting},
      {"evanescence probes", evanescence},
      {"sqrt2 lattice scenario", lattice},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= 60.0) {
      o.passed = false;
      o.summary += " (over the 60 s budget)";
    }
    if (!o.passed) ++failed;
    std::printf("%s [%2zu] %s: %s (%.1f s)\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.summary.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
