#include "hadamard/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "hadamard/l2_induction.hpp"
#include "hadamard/parallel.hpp"
#include "hadamard/splitting.hpp"
#include "hadamard/suites.hpp"
#include "json.hpp"

namespace hadamard {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw SchemaError("field '" + path + "': " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) field_error(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) field_error(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

const json* optional_field(const json& obj, const std::string& key) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index_path(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) field_error(path, "expected a number");
  return v.get<double>();
}

long long as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) field_error(path, "expected an integer");
  return v.get<long long>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) field_error(path, "expected a string");
  return v.get<std::string>();
}

const json& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) field_error(path, "expected an array");
  return v;
}

Vector as_vector(const json& v, const std::string& path) {
  as_array(v, path);
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = as_number(v[i], index_path(path, i));
  return out;
}

Matrix as_matrix(const json& v, const std::string& path) {
  as_array(v, path);
  if (v.empty() || !v[0].is_array()) field_error(path, "expected a non-empty array of rows");
  const std::size_t cols = v[0].size();
  Matrix out(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vector row = as_vector(v[i], index_path(path, i));
    if (static_cast<std::size_t>(row.size()) != cols) field_error(index_path(path, i), "ragged matrix");
    out.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return out;
}

double number_or(const json& params, const std::string& key, double fallback,
                 const std::string& path) {
  const json* v = optional_field(params, key);
  return v ? as_number(*v, join(path, key)) : fallback;
}

long long int_or(const json& params, const std::string& key, long long fallback,
                 const std::string& path) {
  const json* v = optional_field(params, key);
  return v ? as_int(*v, join(path, key)) : fallback;
}

// Library constructors signal invalid input with these; report them against the field.
template <class F>
auto guarded(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SchemaError&) {
    throw;
  } catch (const ConstructionError& e) {
    field_error(path, e.what());
  } catch (const DomainError& e) {
    field_error(path, e.what());
  } catch (const PreconditionError& e) {
    field_error(path, e.what());
  }
}

SpacePtr parse_space(const json& v, const std::string& path) {
  const std::string type = as_string(require(v, "type", path), join(path, "type"));
  return guarded(path, [&]() -> SpacePtr {
    if (type == "euclidean") {
      return make_euclidean(static_cast<int>(as_int(require(v, "dim", path), join(path, "dim"))));
    }
    if (type == "hyperbolic") {
      return make_hyperbolic(static_cast<int>(as_int(require(v, "dim", path), join(path, "dim"))));
    }
    if (type == "spd") {
      return make_spd(static_cast<int>(as_int(require(v, "n", path), join(path, "n"))));
    }
    if (type == "tree") {
      std::vector<MetricTree::Edge> edges;
      if (const json* star = optional_field(v, "star")) {
        const Vector legs = as_vector(*star, join(path, "star"));
        for (Eigen::Index i = 0; i < legs.size(); ++i) {
          edges.push_back({0, static_cast<int>(i) + 1, legs[i]});
        }
        return make_tree(static_cast<int>(legs.size()) + 1, edges);
      }
      const auto count = as_int(require(v, "vertices", path), join(path, "vertices"));
      const json& list = as_array(require(v, "edges", path), join(path, "edges"));
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string p = index_path(join(path, "edges"), i);
        if (!list[i].is_array() || list[i].size() != 3) field_error(p, "expected [u, v, length]");
        edges.push_back({static_cast<int>(as_int(list[i][0], p)), static_cast<int>(as_int(list[i][1], p)),
                         as_number(list[i][2], p)});
      }
      return make_tree(static_cast<int>(count), edges);
    }
    if (type == "product") {
      const json& list = as_array(require(v, "factors", path), join(path, "factors"));
      std::vector<SpacePtr> factors;
      for (std::size_t i = 0; i < list.size(); ++i) {
        factors.push_back(parse_space(list[i], index_path(join(path, "factors"), i)));
      }
      return make_product(factors);
    }
    field_error(join(path, "type"), "unknown space type '" + type + "'");
  });
}

Point parse_point(const ModelSpace& space, const json& v, const std::string& path) {
  return guarded(path, [&]() -> Point {
    switch (space.kind()) {
      case SpaceKind::product:
      case SpaceKind::l2: {
        const auto& prod = static_cast<const ProductSpace&>(space);
        as_array(v, path);
        if (v.size() != prod.factor_count()) {
          field_error(path, "expected " + std::to_string(prod.factor_count()) + " factor points");
        }
        std::vector<Point> parts;
        for (std::size_t i = 0; i < v.size(); ++i) {
          parts.push_back(parse_point(*prod.factor(i), v[i], index_path(path, i)));
        }
        return prod.assemble(parts);
      }
      case SpaceKind::tree: {
        const auto& tree = static_cast<const MetricTree&>(space);
        if (const json* vertex = optional_field(v, "vertex")) {
          const auto id = as_int(*vertex, join(path, "vertex"));
          if (id < 0 || id >= tree.vertex_count()) field_error(join(path, "vertex"), "no such vertex");
          return tree.vertex_point(static_cast<int>(id));
        }
        const auto edge = as_int(require(v, "edge", path), join(path, "edge"));
        if (edge < 0 || edge >= static_cast<long long>(tree.edges().size())) {
          field_error(join(path, "edge"), "no such edge");
        }
        const double offset = as_number(require(v, "offset", path), join(path, "offset"));
        return tree.make_point(tree.edge_coords(static_cast<int>(edge), offset));
      }
      case SpaceKind::hyperbolic: {
        if (const json* spatial = optional_field(v, "spatial")) {
          const Vector x = as_vector(*spatial, join(path, "spatial"));
          Vector full(x.size() + 1);
          full << std::sqrt(1.0 + x.squaredNorm()), x;
          return space.make_point(full);
        }
        return space.make_point(as_vector(v, path));
      }
      case SpaceKind::spd: {
        const auto& spd = static_cast<const SpdSpace&>(space);
        return spd.make_point(spd.to_coords(as_matrix(v, path)));
      }
      case SpaceKind::euclidean:
        return space.make_point(as_vector(v, path));
    }
    field_error(path, "unsupported space");
  });
}

std::vector<Point> parse_points(const ModelSpace& space, const json& v, const std::string& path) {
  as_array(v, path);
  if (v.empty()) field_error(path, "expected at least one point");
  std::vector<Point> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(parse_point(space, v[i], index_path(path, i)));
  return out;
}

Isometry parse_isometry(const SpacePtr& space, const json& v, const std::string& path) {
  const std::string type = as_string(require(v, "type", path), join(path, "type"));
  return guarded(path, [&]() -> Isometry {
    const auto dim = space->coord_size();
    if (type == "identity") return Isometry::identity(space);
    if (type == "euclidean") {
      const json* lin = optional_field(v, "linear");
      const json* tr = optional_field(v, "translation");
      Matrix linear = lin ? as_matrix(*lin, join(path, "linear")) : Matrix::Identity(dim, dim);
      Vector translation = tr ? as_vector(*tr, join(path, "translation")) : Vector::Zero(dim);
      return Isometry(space, EuclideanMotion{linear, translation});
    }
    if (type == "translation") {
      return euclidean_translation(space, as_vector(require(v, "vector", path), join(path, "vector")));
    }
    if (type == "rotation") {
      const double angle = as_number(require(v, "angle", path), join(path, "angle"));
      const json* c = optional_field(v, "center");
      const Vector center = c ? as_vector(*c, join(path, "center")) : Vector::Zero(dim);
      int i = 0, j = 1;
      if (const json* plane = optional_field(v, "plane")) {
        if (!plane->is_array() || plane->size() != 2) field_error(join(path, "plane"), "expected [i, j]");
        i = static_cast<int>(as_int((*plane)[0], join(path, "plane")));
        j = static_cast<int>(as_int((*plane)[1], join(path, "plane")));
      }
      return euclidean_rotation(space, angle, center, i, j);
    }
    if (type == "reflection") {
      // reflection of one coordinate about a value
      const auto axis = int_or(v, "axis", 0, path);
      const double at = number_or(v, "at", 0.0, path);
      if (axis < 0 || axis >= dim) field_error(join(path, "axis"), "out of range");
      Matrix linear = Matrix::Identity(dim, dim);
      linear(axis, axis) = -1.0;
      Vector translation = Vector::Zero(dim);
      translation[axis] = 2.0 * at;
      return Isometry(space, EuclideanMotion{linear, translation});
    }
    if (type == "lorentz") {
      return Isometry(space, LorentzTransform{as_matrix(require(v, "matrix", path), join(path, "matrix"))});
    }
    if (type == "boost") {
      return hyperbolic_boost(space, static_cast<int>(int_or(v, "axis", 1, path)),
                              as_number(require(v, "length", path), join(path, "length")));
    }
    if (type == "hyperbolic_rotation") {
      return hyperbolic_rotation(space, as_number(require(v, "angle", path), join(path, "angle")));
    }
    if (type == "vertex_map") {
      const json& list = as_array(require(v, "map", path), join(path, "map"));
      std::vector<int> map;
      for (std::size_t i = 0; i < list.size(); ++i) {
        map.push_back(static_cast<int>(as_int(list[i], index_path(join(path, "map"), i))));
      }
      return Isometry(space, TreeAutomorphism{map});
    }
    if (type == "congruence") {
      return Isometry(space, Congruence{as_matrix(require(v, "factor", path), join(path, "factor"))});
    }
    if (type == "factors") {
      if (space->kind() != SpaceKind::product) field_error(path, "factor isometry needs a product space");
      const auto& prod = static_cast<const ProductSpace&>(*space);
      const json& list = as_array(require(v, "factors", path), join(path, "factors"));
      if (list.size() != prod.factor_count()) field_error(join(path, "factors"), "wrong factor count");
      std::vector<Isometry> parts;
      for (std::size_t i = 0; i < list.size(); ++i) {
        parts.push_back(parse_isometry(prod.factor(i), list[i], index_path(join(path, "factors"), i)));
      }
      return Isometry(space, FactorwiseIsometry{parts});
    }
    field_error(join(path, "type"), "unknown isometry type '" + type + "'");
  });
}

struct Context {
  json params = json::object();
  std::string path = "params";
  std::uint64_t seed = 0;
  std::optional<std::size_t> trials_override;
  SpacePtr space;
  std::vector<std::pair<std::string, RepPtr>> actions;
  std::vector<CheckRecord> records;
  json results = json::object();
  std::chrono::steady_clock::time_point mark = std::chrono::steady_clock::now();

  std::size_t trials(std::size_t fallback) const {
    if (trials_override) return *trials_override;
    const auto t = int_or(params, "trials", static_cast<long long>(fallback), path);
    if (t < 1) field_error(join(path, "trials"), "must be at least 1");
    return static_cast<std::size_t>(t);
  }

  void add(const std::string& name, double defect, double tolerance, std::size_t n = 1,
           std::string detail = {}) {
    const auto now = std::chrono::steady_clock::now();
    CheckRecord r{name, false, defect, tolerance, n, std::move(detail),
                  std::chrono::duration<double>(now - mark).count()};
    records.push_back(std::move(r));
    mark = now;
  }

  void add(const Check& c) { add(c.name, c.defect, c.tolerance, c.trials, c.detail); }

  const IsometryRep& action(const std::string& name) const {
    for (const auto& [n, rep] : actions) {
      if (n == name) return *rep;
    }
    field_error(join(path, "action"), "unknown action '" + name + "'");
  }

  RepPtr action_ptr(const std::string& name, const std::string& at) const {
    for (const auto& [n, rep] : actions) {
      if (n == name) return rep;
    }
    field_error(at, "unknown action '" + name + "'");
  }

  Point point_param(const std::string& key) const {
    const json* v = optional_field(params, key);
    return v ? parse_point(*space, *v, join(path, key)) : space->base_point();
  }
};

json coords_json(const Point& p) {
  json out = json::array();
  for (Eigen::Index i = 0; i < p.coords.size(); ++i) out.push_back(p.coords[i]);
  return out;
}

std::vector<Point> random_points(const ModelSpace& s, Rng& rng, std::size_t n, double scale) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(s.random_point(rng, s.base_point(), scale));
  return out;
}

void task_axioms(Context& c) {
  const std::size_t trials = c.trials(1000);
  const std::string label = optional_field(c.params, "label")
                                ? as_string(c.params["label"], join(c.path, "label"))
                                : to_string(c.space->kind());
  for (const auto& check : fuzz_space({label, c.space}, trials, c.seed)) c.add(check);
}

void task_circumcenter(Context& c) {
  const auto pts = parse_points(*c.space, require(c.params, "points", c.path), join(c.path, "points"));
  const CircumResult r = circumcenter(*c.space, pts, CircumOptions{c.seed});
  Rng rng(c.seed, 0xc1c);
  const double improvement = circumcenter_improvement(*c.space, pts, r, rng, 256);
  c.add("circum_minimax", -improvement, 1e-6, 256);
  c.add("circum_dual_gap", -(r.radius - r.lower_bound), 1e-6);
  const ConvexBody hull = dyadic_hull_within_cap(c.space, pts, 3);
  c.add("circum_in_hull", -c.space->distance(r.center, project(hull, r.center)), 1e-6);
  c.results["center"] = coords_json(r.center);
  c.results["radius"] = r.radius;
  c.results["lower_bound"] = r.lower_bound;
}

void task_barycenter(Context& c) {
  const auto pts = parse_points(*c.space, require(c.params, "points", c.path), join(c.path, "points"));
  std::vector<double> w(pts.size(), 1.0 / static_cast<double>(pts.size()));
  if (const json* wj = optional_field(c.params, "weights")) {
    const Vector v = as_vector(*wj, join(c.path, "weights"));
    if (static_cast<std::size_t>(v.size()) != pts.size()) {
      field_error(join(c.path, "weights"), "one weight per point expected");
    }
    w.assign(v.data(), v.data() + v.size());
  }
  const BarycenterResult b = guarded(join(c.path, "weights"), [&] { return barycenter(*c.space, pts, w); });
  // variance inequality: sum w d²(y, x_i) >= sum w d²(b, x_i) + d²(y, b)
  const std::size_t trials = c.trials(256);
  std::vector<double> defects(trials);
  parallel_for(trials, [&](std::size_t i) {
    Rng rng(c.seed, 0xba7, i);
    const Point y = c.space->random_point(rng, b.point, 3.0);
    const double d = c.space->distance(y, b.point);
    defects[i] = weighted_sq_sum(*c.space, pts, w, y) - b.value - d * d;
  });
  c.add("bary_variance", *std::min_element(defects.begin(), defects.end()), 1e-6, trials);
  c.results["point"] = coords_json(b.point);
  c.results["value"] = b.value;
  c.results["iterations"] = b.iterations;
}

std::vector<std::size_t> generator_indices(const IsometryRep& rep, const json* names,
                                           const std::string& path) {
  if (!names) {
    std::vector<std::size_t> all(rep.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
  }
  as_array(*names, path);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < names->size(); ++i) {
    const std::string n = as_string((*names)[i], index_path(path, i));
    const auto idx = rep.find(n);
    if (!idx) field_error(index_path(path, i), "unknown generator '" + n + "'");
    out.push_back(*idx);
  }
  return out;
}

void task_evanescence(Context& c) {
  const std::string name = optional_field(c.params, "action")
                               ? as_string(c.params["action"], join(c.path, "action"))
                               : (c.actions.empty() ? std::string() : c.actions.front().first);
  if (c.actions.empty()) field_error("actions", "the evanescence task needs an action");
  const IsometryRep& rep = c.action(name);
  const auto q = generator_indices(rep, optional_field(c.params, "q"), join(c.path, "q"));
  const Point x0 = c.point_param("x0");
  std::vector<double> radii = {1, 2, 4, 8, 16, 32};
  if (const json* r = optional_field(c.params, "radii")) {
    const Vector v = as_vector(*r, join(c.path, "radii"));
    radii.assign(v.data(), v.data() + v.size());
  }
  ProbeOptions opts;
  opts.directions = static_cast<int>(int_or(c.params, "directions", 64, c.path));
  opts.slack = number_or(c.params, "slack", 1e-6, c.path);
  opts.seed = c.seed;
  const auto v = guarded(c.path, [&] { return evanescence_probe(rep, q, x0, radii, opts); });
  if (const json* expect = optional_field(c.params, "expect")) {
    std::string want = as_string(*expect, join(c.path, "expect"));
    std::replace(want.begin(), want.end(), '_', '-');
    c.add("evanescence_verdict", to_string(v.verdict) == want ? 0.0 : -1.0, 0.0, 1,
          "expected " + want + ", got " + to_string(v.verdict));
  }
  if (const json* lam = optional_field(c.params, "lambda_expected")) {
    const double want = as_number(*lam, join(c.path, "lambda_expected"));
    const double rel = std::abs(v.lambda - want) / std::max(std::abs(want), 1e-300);
    c.add("evanescence_lambda", -rel, number_or(c.params, "lambda_rel_tol", 0.05, c.path));
  }
  const double fit = v.verdict == Verdict::non_evanescent_fit ? -std::max(0.0, v.fit_violation) : 0.0;
  c.add("evanescence_fit_consistency", fit, 1e-9);
  c.results["verdict"] = to_string(v.verdict);
  c.results["lambda"] = v.lambda;
  c.results["d0"] = v.d0;
  c.results["bound"] = v.bound;
  c.results["witness_points"] = v.witness.size();
}

std::vector<long long> steps_param(const Context& c) {
  std::vector<long long> steps = {1};
  if (const json* s = optional_field(c.params, "steps")) {
    as_array(*s, join(c.path, "steps"));
    steps.clear();
    for (std::size_t i = 0; i < s->size(); ++i) steps.push_back(as_int((*s)[i], index_path(join(c.path, "steps"), i)));
  }
  return steps;
}

LatticeScenario lattice_param(const Context& c, const std::string& key = "N") {
  const auto n = as_int(require(c.params, key, c.path), join(c.path, key));
  const auto cap = int_or(c.params, "word_cap", 64, c.path);
  return guarded(join(c.path, key), [&] {
    return LatticeScenario(static_cast<int>(n), steps_param(c), static_cast<int>(cap));
  });
}

InducedAction induced_param(const Context& c) {
  const LatticeScenario scenario = lattice_param(c);
  const Isometry gamma = parse_isometry(c.space, require(c.params, "gamma", c.path), join(c.path, "gamma"));
  return InducedAction(scenario, c.space, gamma);
}

std::vector<L2Map> random_maps(const InducedAction& act, std::uint64_t seed, std::uint64_t stream,
                               std::size_t n) {
  std::vector<L2Map> out;
  const ModelSpace& x = *act.space()->target();
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(seed, stream, i);
    out.push_back(L2Map::from_values(act.space(), random_points(x, rng, act.space()->factor_count(), 2.0)));
  }
  return out;
}

void task_induce(Context& c) {
  const InducedAction act = induced_param(c);
  const long long n = act.scenario().grid_size();
  const long long h_max = int_or(c.params, "h_max", 3, c.path);
  const std::size_t trials = c.trials(32);
  const auto f = random_maps(act, c.seed, 0x1d1, trials);
  const auto fp = random_maps(act, c.seed, 0x1d2, trials);

  std::vector<long long> grid;
  for (long long k = -h_max * n; k <= h_max * n; ++k) grid.push_back(k);

  double identity = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    identity = std::max(identity, l2_distance(induced_act(act, GridElement{0}, f[i]), f[i]));
  }
  c.add("induce_identity", -identity, 1e-12, trials);

  std::vector<double> iso(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const std::size_t t = i % trials;
    const GridElement h{grid[i]};
    iso[i] = std::abs(l2_distance(induced_act(act, h, f[t]), induced_act(act, h, fp[t])) -
                      l2_distance(f[t], fp[t]));
  });
  c.add("induce_isometric", -*std::max_element(iso.begin(), iso.end()), 1e-9, grid.size());

  // every grid element appears as h1; partners are all of them on small grids
  const std::size_t partners = grid.size() <= 64 ? grid.size() : 8;
  std::vector<double> comp(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    Rng rng(c.seed, 0xc03, i);
    double worst = 0.0;
    for (std::size_t k = 0; k < partners; ++k) {
      const long long h2 = partners == grid.size() ? grid[k] : grid[rng.index(grid.size())];
      const L2Map& g = f[(i + k) % trials];
      const L2Map once = induced_act(act, GridElement{grid[i] + h2}, g);
      const L2Map twice = induced_act(act, GridElement{grid[i]}, induced_act(act, GridElement{h2}, g));
      worst = std::max(worst, l2_distance(once, twice));
    }
    comp[i] = worst;
  });
  c.add("induce_composition", -*std::max_element(comp.begin(), comp.end()), 1e-8,
        grid.size() * partners);

  Rng rng(c.seed, 0xc04);
  const Point x = c.space->random_point(rng, c.space->base_point(), 2.0);
  const L2Map psi = L2Map::constant(act.space(), x);
  const L2Map moved = induced_act(act, GridElement{n}, psi);
  c.add("induce_lattice_element",
        -l2_distance(moved, L2Map::constant(act.space(), act.gamma().apply(x))), 1e-9);

  double disp = INFINITY, spread = INFINITY, tri = INFINITY;
  for (std::size_t i = 0; i < trials; ++i) {
    const TransferReport r = evanescence_transfer_check(act, f[i]);
    disp = std::min(disp, r.displacement.defect);
    spread = std::min(spread, r.spread.defect);
    tri = std::min(tri, r.triangle.defect);
  }
  c.add("transfer_displacement", disp, 1e-9, trials);
  c.add("transfer_spread", spread, 1e-9, trials);
  c.add("transfer_triangle", tri, 1e-9, trials);
  c.results["grid_size"] = n;
  c.results["grid_elements"] = grid.size();
}

void task_average(Context& c) {
  const InducedAction act = induced_param(c);
  std::vector<double> shifts = {0.0};
  if (const json* s = optional_field(c.params, "shifts")) {
    const Vector v = as_vector(*s, join(c.path, "shifts"));
    if (v.size() == 0) field_error(join(c.path, "shifts"), "A must be non-empty");
    shifts.assign(v.data(), v.data() + v.size());
  }
  std::vector<AveragingElement> a;
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    const GridElement h = guarded(index_path(join(c.path, "shifts"), i),
                                  [&] { return act.scenario().grid_element(shifts[i]); });
    a.push_back(shift_element(act, h));
  }
  const std::size_t trials = c.trials(1000);
  const auto f = random_maps(act, c.seed, 0xa1, trials);
  const auto fp = random_maps(act, c.seed, 0xa2, trials);
  std::vector<double> defects(trials), moved(trials);
  parallel_for(trials, [&](std::size_t i) {
    const L2Map af = commensurator_average(a, f[i]);
    defects[i] = l2_distance(f[i], fp[i]) - l2_distance(af, commensurator_average(a, fp[i]));
    moved[i] = l2_distance(af, f[i]);
  });
  c.add("average_nonexpansion", *std::min_element(defects.begin(), defects.end()), 1e-6, trials);
  if (shifts.size() == 1 && shifts[0] == 0.0) {
    c.add("average_identity", -*std::max_element(moved.begin(), moved.end()), 1e-9, trials);
  }
  if (optional_field(c.params, "fixed_point")) {
    const Point x = c.point_param("fixed_point");
    const L2Map psi = L2Map::constant(act.space(), x);
    c.add("average_fixes_constant", -l2_distance(commensurator_average(a, psi), psi), 1e-9);
  }
  c.results["averaging_set_size"] = a.size();
}

void task_sqint(Context& c) {
  const LatticeScenario scenario = lattice_param(c);
  const Vector g = as_vector(require(c.params, "g", c.path), join(c.path, "g"));
  auto grid_of = [&](const LatticeScenario& s) {
    std::vector<GridElement> out;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      out.push_back(guarded(index_path(join(c.path, "g"), static_cast<std::size_t>(i)),
                            [&] { return s.grid_element(g[i]); }));
    }
    return out;
  };
  const auto est = guarded(c.path, [&] { return square_integrability_estimate(scenario, grid_of(scenario)); });
  bool finite = true;
  for (double e : est) finite = finite && std::isfinite(e);
  c.add("sqint_finite", finite ? 0.0 : -INFINITY, 0.0, est.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (g[i] == 0.0) c.add("sqint_identity_zero", -std::abs(est[i]), 0.0);
  }
  c.results["estimates"] = est;
  if (optional_field(c.params, "refine_N")) {
    const LatticeScenario fine = lattice_param(c, "refine_N");
    const auto est2 = guarded(c.path, [&] { return square_integrability_estimate(fine, grid_of(fine)); });
    double gap = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i) {
      const double scale = std::max(std::abs(est[i]), std::abs(est2[i]));
      if (scale > 0.0) gap = std::max(gap, std::abs(est[i] - est2[i]) / scale);
    }
    c.add("sqint_refinement", -gap, 0.02, est.size());
    c.results["refined_estimates"] = est2;
  }
}

void task_split(Context& c) {
  std::vector<RepPtr> reps;
  if (const json* list = optional_field(c.params, "factors")) {
    as_array(*list, join(c.path, "factors"));
    for (std::size_t i = 0; i < list->size(); ++i) {
      const std::string at = index_path(join(c.path, "factors"), i);
      reps.push_back(c.action_ptr(as_string((*list)[i], at), at));
    }
  } else {
    for (const auto& [n, rep] : c.actions) reps.push_back(rep);
  }
  const ProductAction action = guarded(join(c.path, "factors"), [&] { return ProductAction(reps); });
  std::vector<Point> seeds = {c.space->base_point()};
  if (const json* s = optional_field(c.params, "seeds")) {
    seeds = parse_points(*c.space, *s, join(c.path, "seeds"));
  }
  SplittingOptions opts;
  opts.minimal.ball_radius = static_cast<int>(int_or(c.params, "ball_radius", 4, c.path));
  opts.minimal.hull_depth = static_cast<int>(int_or(c.params, "hull_depth", 2, c.path));
  opts.test_pairs = static_cast<int>(c.trials_override.value_or(
      static_cast<std::size_t>(int_or(c.params, "test_pairs", 1000, c.path))));
  opts.seed = c.seed;
  c.add("split_commutation", -action.commutation_residual(), 1e-9);
  try {
    const SplittingResult r = build_splitting(action, seeds, opts);
    c.add("split_pythagoras", -r.pythagoras_residual, 1e-5, static_cast<std::size_t>(opts.test_pairs));
    c.add("split_holonomy", -r.holonomy_residual, 1e-5);
    c.add("split_star", -r.star_residual, 1e-5);
    c.add("split_equivariance", -r.equivariance_residual, 1e-5);
    json comps = json::array();
    for (const auto& comp : r.components) {
      comps.push_back({{"samples", comp.body.samples.size()},
                       {"diameter", comp.body.diameter()},
                       {"invariance_residual", comp.invariance_residual}});
    }
    c.results["components"] = comps;
    c.results["diagnostics"] = r.diagnostics;
  } catch (const EvanescenceDiagnostic& e) {
    c.add("split_dichotomy", -INFINITY, 0.0, 1, e.what());
    c.results["diagnostics"] = json::array({e.what()});
  }
}

// Gamma = {((n + m a, e), (n - m a, e))} in (R x {±1})², acting on R by x -> e x + n.
void task_lattice(Context& c) {
  if (c.space->kind() != SpaceKind::euclidean || c.space->coord_size() != 1) {
    field_error("space", "the lattice task acts on the real line");
  }
  const double a = number_or(c.params, "alpha", std::sqrt(2.0), c.path);
  const long long range = int_or(c.params, "range", 50, c.path);
  const double max_gap = number_or(c.params, "max_gap", 0.05, c.path);
  const std::size_t trials = c.trials(200);

  struct Element {
    long long n, m;
    int e;
  };
  auto motion = [&](const Element& g) {
    Matrix lin(1, 1);
    lin(0, 0) = g.e;
    Vector t(1);
    t[0] = static_cast<double>(g.n);
    return Isometry(c.space, EuclideanMotion{lin, t});
  };
  auto product = [](const Element& g, const Element& h) {
    return Element{g.n + g.e * h.n, g.m + g.e * h.m, g.e * h.e};
  };
  double iso = 0.0, hom = 0.0, embed = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    Rng rng(c.seed, 0x1a7, i);
    auto draw = [&] {
      return Element{static_cast<long long>(rng.index(2 * range + 1)) - range,
                     static_cast<long long>(rng.index(2 * range + 1)) - range, rng.uniform() < 0.5 ? 1 : -1};
    };
    const Element g = draw(), h = draw();
    const Isometry mg = motion(g);
    const Isometry mh = motion(h);
    const Isometry mgh = motion(product(g, h));
    const Point x = c.space->random_point(rng, c.space->base_point(), 10.0);
    const Point y = c.space->random_point(rng, c.space->base_point(), 10.0);
    iso = std::max(iso, std::abs(c.space->distance(mg.apply(x), mg.apply(y)) - c.space->distance(x, y)));
    hom = std::max(hom, c.space->distance(mgh.apply(x), mg.apply(mh.apply(x))));
    // both projections respect the group law (a, e)(b, f) = (a + e b, e f)
    const Element gh = product(g, h);
    for (double sign : {1.0, -1.0}) {
      const double lhs = static_cast<double>(gh.n) + sign * static_cast<double>(gh.m) * a;
      const double rhs = (static_cast<double>(g.n) + sign * static_cast<double>(g.m) * a) +
                         g.e * (static_cast<double>(h.n) + sign * static_cast<double>(h.m) * a);
      embed = std::max(embed, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
    }
  }
  c.add("lattice_isometric", -iso, 1e-9, trials);
  c.add("lattice_homomorphism", -hom, 1e-9, trials);
  c.add("lattice_embedding", -embed, 1e-12, trials);

  double worst_gap = 0.0;
  for (double sign : {1.0, -1.0}) {
    std::vector<double> frac;
    for (long long n = -range; n <= range; ++n) {
      for (long long m = -range; m <= range; ++m) {
        const double v = static_cast<double>(n) + sign * static_cast<double>(m) * a;
        frac.push_back(v - std::floor(v));
      }
    }
    std::sort(frac.begin(), frac.end());
    double gap = frac.front() + 1.0 - frac.back();
    for (std::size_t i = 1; i < frac.size(); ++i) gap = std::max(gap, frac[i] - frac[i - 1]);
    worst_gap = std::max(worst_gap, gap);
  }
  c.add("lattice_projection_density", max_gap - worst_gap, 0.0, 2);
  c.results["max_gap"] = worst_gap;
  c.results["alpha"] = a;
}

using TaskFn = void (*)(Context&);

const std::map<std::string, TaskFn>& tasks() {
  static const std::map<std::string, TaskFn> t = {
      {"axioms", task_axioms},   {"circumcenter", task_circumcenter}, {"barycenter", task_barycenter},
      {"evanescence", task_evanescence}, {"induce", task_induce},    {"average", task_average},
      {"split", task_split},     {"sqint", task_sqint},               {"lattice", task_lattice}};
  return t;
}

void apply_tolerances(std::vector<CheckRecord>& records, const std::map<std::string, double>& tol) {
  for (auto& r : records) {
    const auto slash = r.name.rfind('/');
    const std::string tail = slash == std::string::npos ? r.name : r.name.substr(slash + 1);
    if (auto it = tol.find(r.name); it != tol.end()) {
      r.tolerance = it->second;
    } else if (auto jt = tol.find(tail); jt != tol.end()) {
      r.tolerance = jt->second;
    }
    r.passed = r.defect >= -r.tolerance;
  }
}

std::map<std::string, double> parse_tolerance_map(const json& v, const std::string& path) {
  if (!v.is_object()) field_error(path, "expected an object of numbers");
  std::map<std::string, double> out;
  for (auto it = v.begin(); it != v.end(); ++it) out[it.key()] = as_number(it.value(), join(path, it.key()));
  return out;
}

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

bool Report::all_passed() const { return failed_count() == 0; }

std::size_t Report::failed_count() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const CheckRecord& r) { return !r.passed; }));
}

Report run_scenario_text(const std::string& text, const RunOptions& options) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    throw SchemaError("malformed JSON at " + line_column(text, at));
  }
  if (!doc.is_object()) throw SchemaError("field '<root>': expected an object");

  static const std::set<std::string> known = {"schema_version", "name", "description", "seed", "space",
                                              "actions", "task", "params", "tolerances"};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!known.count(it.key())) field_error(it.key(), "unknown field");
  }
  const auto version = as_int(require(doc, "schema_version", ""), "schema_version");
  if (version != kSchemaVersion) {
    field_error("schema_version", "unsupported version " + std::to_string(version));
  }
  const std::string task = as_string(require(doc, "task", ""), "task");
  const auto fn = tasks().find(task);
  if (fn == tasks().end()) field_error("task", "unknown task '" + task + "'");

  Context c;
  c.space = parse_space(require(doc, "space", ""), "space");
  if (const json* s = optional_field(doc, "seed")) {
    const auto seed = as_int(*s, "seed");
    if (seed < 0) field_error("seed", "must be non-negative");
    c.seed = static_cast<std::uint64_t>(seed);
  }
  if (options.seed) c.seed = *options.seed;
  c.trials_override = options.trials;
  if (const json* p = optional_field(doc, "params")) {
    if (!p->is_object()) field_error("params", "expected an object");
    c.params = *p;
  }
  if (const json* acts = optional_field(doc, "actions")) {
    as_array(*acts, "actions");
    for (std::size_t i = 0; i < acts->size(); ++i) {
      const std::string path = index_path("actions", i);
      const json& a = (*acts)[i];
      const std::string name = as_string(require(a, "name", path), join(path, "name"));
      const json& gens = as_array(require(a, "generators", path), join(path, "generators"));
      std::vector<std::pair<std::string, Isometry>> list;
      for (std::size_t j = 0; j < gens.size(); ++j) {
        const std::string gp = index_path(join(path, "generators"), j);
        list.emplace_back(as_string(require(gens[j], "name", gp), join(gp, "name")),
                          parse_isometry(c.space, require(gens[j], "isometry", gp), join(gp, "isometry")));
      }
      const int cap = static_cast<int>(int_or(a, "word_cap", 8, path));
      c.actions.emplace_back(name, guarded(path, [&] {
                               return std::make_shared<const IsometryRep>(c.space, list, cap);
                             }));
    }
  }
  std::map<std::string, double> tol;
  if (const json* t = optional_field(doc, "tolerances")) tol = parse_tolerance_map(*t, "tolerances");
  for (const auto& [k, v] : options.tolerances) tol[k] = v;

  fn->second(c);

  Report report;
  report.scenario = optional_field(doc, "name") ? as_string(doc["name"], "name") : task;
  report.task = task;
  report.seed = c.seed;
  report.records = std::move(c.records);
  report.results = c.results.dump();
  apply_tolerances(report.records, tol);
  return report;
}

Report run_scenario_file(const std::string& path, const RunOptions& options) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read scenario file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return run_scenario_text(buffer.str(), options);
}

Report run_fuzz(const std::vector<std::string>& spaces, std::size_t trials, std::uint64_t seed,
                bool timing) {
  if (trials < 1) throw SchemaError("field 'trials': must be at least 1");
  std::vector<NamedSpace> chosen;
  const auto all = standard_spaces();
  if (spaces.empty() || (spaces.size() == 1 && spaces[0] == "all")) {
    chosen = all;
  } else {
    for (const auto& label : spaces) {
      auto it = std::find_if(all.begin(), all.end(), [&](const NamedSpace& s) { return s.label == label; });
      if (it == all.end()) throw SchemaError("field 'spaces': unknown space '" + label + "'");
      chosen.push_back(*it);
    }
  }
  Report report;
  report.scenario = "fuzz";
  report.task = "fuzz";
  report.seed = seed;
  json labels = json::array();
  for (const auto& ns : chosen) {
    labels.push_back(ns.label);
    auto start = std::chrono::steady_clock::now();
    for (const auto& c : fuzz_space(ns, trials, seed)) {
      const auto now = std::chrono::steady_clock::now();
      report.records.push_back({c.name, c.passed(), c.defect, c.tolerance, c.trials, c.detail,
                                timing ? std::chrono::duration<double>(now - start).count() : 0.0});
      start = now;
    }
  }
  report.results = json{{"spaces", labels}}.dump();
  apply_tolerances(report.records, {});
  return report;
}

std::string report_json(const Report& report, bool timing) {
  json out;
  out["schema_version"] = kSchemaVersion;
  out["scenario"] = report.scenario;
  out["task"] = report.task;
  json records = json::array();
  for (const auto& r : report.records) {
    json rec;
    rec["name"] = r.name;
    rec["status"] = r.passed ? "pass" : "fail";
    rec["defect"] = r.defect + 0.0;  // no negative zero
    rec["tolerance"] = r.tolerance;
    rec["trials"] = r.trials;
    if (!r.detail.empty()) rec["detail"] = r.detail;
    if (timing) rec["runtime_s"] = r.runtime;
    records.push_back(rec);
  }
  out["records"] = records;
  out["results"] = json::parse(report.results);
  const std::size_t failed = report.failed_count();
  out["summary"] = {{"total", report.records.size()},
                    {"passed", report.records.size() - failed},
                    {"failed", failed}};
  out["environment"] = {{"seed", report.seed}, {"version", kVersion}};
  if (timing) out["environment"]["threads"] = thread_count();
  return out.dump(2) + "\n";
}

std::string report_csv(const Report& report) {
  std::ostringstream out;
  out.precision(17);
  out << "name,status,defect,tolerance,trials\n";
  for (const auto& r : report.records) {
    out << r.name << ',' << (r.passed ? "pass" : "fail") << ',' << r.defect << ',' << r.tolerance
        << ',' << r.trials << '\n';
  }
  return out.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

void parse_tolerance_override(const std::string& spec, std::map<std::string, double>& out) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw SchemaError("--tol expects key=value, got '" + spec + "'");
  try {
    std::size_t used = 0;
    const double v = std::stod(spec.substr(eq + 1), &used);
    if (used != spec.size() - eq - 1 || !(v >= 0.0)) throw std::invalid_argument("bad");
    out[spec.substr(0, eq)] = v;
  } catch (const std::exception&) {
    throw SchemaError("--tol value for '" + spec.substr(0, eq) + "' is not a non-negative number");
  }
}

}  // namespace hadamard
