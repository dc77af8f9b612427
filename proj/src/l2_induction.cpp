#include "hadamard/l2_induction.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>

namespace hadamard {

namespace {

long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

void require_same(const L2Map& f, const L2Map& fp) {
  if (!f.space || f.space.get() != fp.space.get()) {
    throw DomainError("L2 maps over different bases or targets");
  }
}

}  // namespace

FiniteMeasureSpace::FiniteMeasureSpace(std::vector<std::string> atoms, std::vector<double> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (weights_.empty()) throw ConstructionError("measure space without atoms");
  if (atoms_.empty()) {
    for (std::size_t i = 0; i < weights_.size(); ++i) atoms_.push_back(std::to_string(i));
  }
  if (atoms_.size() != weights_.size()) throw ConstructionError("atoms and weights differ in length");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0)) throw ConstructionError("atom weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConstructionError("atom weights do not sum to 1");
}

MeasurePtr FiniteMeasureSpace::uniform(std::size_t n) {
  return std::make_shared<FiniteMeasureSpace>(std::vector<std::string>{},
                                              std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

L2Space::L2Space(MeasurePtr base, SpacePtr target)
    : ProductSpace(std::vector<SpacePtr>(base->size(), target), base->weights()),
      base_(std::move(base)),
      target_(std::move(target)) {}

std::string L2Space::name() const {
  return "L2(" + std::to_string(base_->size()) + " atoms, " + target_->name() + ")";
}

L2Ptr make_l2(MeasurePtr base, SpacePtr target) {
  auto space = std::make_shared<const L2Space>(std::move(base), std::move(target));
  self_test(*space, 100);
  return space;
}

L2Map L2Map::from_values(L2Ptr space, const std::vector<Point>& values) {
  if (values.size() != space->factor_count()) throw DomainError("one value per atom expected");
  Point p = space->assemble(values);
  return L2Map{std::move(space), std::move(p)};
}

L2Map L2Map::constant(L2Ptr space, const Point& x) {
  std::vector<Point> values(space->factor_count(), x);
  return from_values(std::move(space), values);
}

std::vector<Point> L2Map::values() const {
  std::vector<Point> out;
  for (std::size_t i = 0; i < size(); ++i) out.push_back(value(i));
  return out;
}

double SemiDensity::mass() const {
  double m = 0.0;
  for (Eigen::Index i = 0; i < alpha.size(); ++i) m += base->weight(i) * alpha[i] * alpha[i];
  return m;
}

double l2_distance(const L2Map& f, const L2Map& fp) {
  require_same(f, fp);
  return f.space->distance(f.point, fp.point);
}

SemiDensity decompose_geodesic(const L2Map& f, const L2Map& g) {
  require_same(f, g);
  const std::size_t n = f.size();
  const double total = l2_distance(f, g);
  SemiDensity a{f.space->base(), Vector::Ones(static_cast<Eigen::Index>(n))};
  if (total == 0.0) return a;
  const SpacePtr& x = f.space->target();
  for (std::size_t i = 0; i < n; ++i) {
    a.alpha[i] = x->coord_distance(f.space->coord_component(i, f.point.coords),
                                   f.space->coord_component(i, g.point.coords)) /
                 total;
  }
  return a;
}

L2GeodesicPoint l2_geodesic(const L2Map& f, const L2Map& fp, double t) {
  require_same(f, fp);
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("geodesic parameter outside [0,1]");
  L2Map m{f.space, f.space->geodesic_point(f.point, fp.point, t)};
  return L2GeodesicPoint{std::move(m), decompose_geodesic(f, fp)};
}

RectangleReport rectangle_check(const L2Map& a1, const L2Map& b1, const L2Map& a2,
                                const L2Map& b2, int t_samples) {
  require_same(a1, b1);
  require_same(a1, a2);
  require_same(a1, b2);
  if (t_samples < 2) throw DomainError("need at least two parameter samples");
  const L2Space& l2 = *a1.space;
  const ModelSpace& x = *l2.target();
  std::vector<Point> s1, s2;
  for (int k = 0; k < t_samples; ++k) {
    const double t = static_cast<double>(k) / (t_samples - 1);
    s1.push_back(l2.geodesic_point(a1.point, b1.point, t));
    s2.push_back(l2.geodesic_point(a2.point, b2.point, t));
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (int k = 0; k < t_samples; ++k) {
    const double d = l2.distance(s1[k], s2[k]);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  const double len_gap = std::abs(l2.distance(a1.point, b1.point) - l2.distance(a2.point, b2.point));
  RectangleReport r;
  r.flatness = std::max(hi - lo, len_gap);
  if (r.flatness > 1e-6) {
    throw PreconditionError("the two geodesics do not bound a flat rectangle (oscillation " +
                            std::to_string(r.flatness) + ")");
  }
  const SemiDensity al1 = decompose_geodesic(a1, b1);
  const SemiDensity al2 = decompose_geodesic(a2, b2);
  for (std::size_t i = 0; i < l2.factor_count(); ++i) {
    double olo = std::numeric_limits<double>::infinity();
    double ohi = 0.0;
    for (int k = 0; k < t_samples; ++k) {
      const double d = x.coord_distance(l2.coord_component(i, s1[k].coords),
                                        l2.coord_component(i, s2[k].coords));
      olo = std::min(olo, d);
      ohi = std::max(ohi, d);
    }
    const double osc = ohi - olo;
    const double gap = std::abs(al1.alpha[i] - al2.alpha[i]);
    r.oscillation.push_back(osc);
    r.alpha_gap.push_back(gap);
    r.per_atom.push_back(make_defect(std::max(osc, gap), 0.0));
  }
  return r;
}

Point barycenter_map(const L2Map& f) {
  const auto values = f.values();
  return barycenter(*f.space->target(), values, f.space->base()->weights()).point;
}

LatticeScenario::LatticeScenario(int grid_size, std::vector<long long> steps, int word_cap)
    : n_(grid_size), steps_(std::move(steps)), word_cap_(word_cap) {
  if (n_ < 1) throw ConstructionError("grid size must be positive");
  if (steps_.empty()) throw ConstructionError("lattice needs generators");
  if (word_cap_ < 0) throw ConstructionError("negative word cap");
  long long reach = 0;
  for (long long s : steps_) {
    if (s == 0) throw ConstructionError("zero lattice generator");
    reach = std::max(reach, std::abs(s));
  }
  offset_ = reach * word_cap_;
  lengths_.assign(static_cast<std::size_t>(2 * offset_ + 1), -1);
  std::deque<long long> queue{0};
  lengths_[offset_] = 0;
  while (!queue.empty()) {
    const long long v = queue.front();
    queue.pop_front();
    const int len = lengths_[v + offset_];
    if (len >= word_cap_) continue;
    for (long long s : steps_) {
      for (long long w : {v + s, v - s}) {
        if (std::abs(w) > offset_ || lengths_[w + offset_] >= 0) continue;
        lengths_[w + offset_] = len + 1;
        queue.push_back(w);
      }
    }
  }
}

GridElement LatticeScenario::grid_element(double h) const {
  const double k = h * n_;
  const double r = std::round(k);
  if (std::abs(k - r) > 1e-9) {
    throw DomainError("h = " + std::to_string(h) + " is not on the grid of size " +
                      std::to_string(n_));
  }
  return GridElement{static_cast<long long>(r)};
}

long long LatticeScenario::chi_at_cell(int j, GridElement h) const {
  // g_j - h = (2(j - k) + 1) / (2N)
  return -floor_div(2 * (j - h.k) + 1, 2LL * n_);
}

int LatticeScenario::shifted_cell(int j, GridElement h) const {
  long long c = (j - h.k) % n_;
  if (c < 0) c += n_;
  return static_cast<int>(c);
}

int LatticeScenario::word_length(long long n) const {
  if (std::abs(n) > offset_ || lengths_[n + offset_] < 0) {
    throw DomainError("lattice element " + std::to_string(n) + " is outside the word ball of radius " +
                      std::to_string(word_cap_));
  }
  return lengths_[n + offset_];
}

InducedAction::InducedAction(LatticeScenario scenario, SpacePtr target, Isometry gamma)
    : scenario_(std::move(scenario)),
      space_(make_l2(FiniteMeasureSpace::uniform(scenario_.grid_size()), target)),
      gamma_(std::move(gamma)) {
  if (gamma_.space().get() != target.get()) {
    throw ConstructionError("lattice generator acts on a different space");
  }
}

L2Map induced_act(const InducedAction& action, GridElement h, const L2Map& f) {
  if (f.space.get() != action.space().get()) throw DomainError("map is not over the scenario grid");
  const LatticeScenario& sc = action.scenario();
  const L2Space& l2 = *action.space();
  const auto& x = l2.target();
  Vector out(l2.coord_size());
  std::map<long long, Isometry> powers;
  for (int j = 0; j < sc.grid_size(); ++j) {
    const long long c = sc.chi_at_cell(j, h);
    auto it = powers.find(c);
    if (it == powers.end()) it = powers.emplace(c, action.gamma_power(c)).first;
    const Vector v = l2.coord_component(static_cast<std::size_t>(sc.shifted_cell(j, h)), f.point.coords);
    out.segment(l2.offset(j), x->coord_size()) = it->second.apply_coords(v);
  }
  return L2Map{action.space(), l2.wrap(std::move(out))};
}

L2Map induced_act(const InducedAction& action, double h, const L2Map& f) {
  return induced_act(action, action.scenario().grid_element(h), f);
}

AveragingElement shift_element(const InducedAction& action, GridElement h) {
  const LatticeScenario& sc = action.scenario();
  AveragingElement a;
  std::map<long long, Isometry> powers;
  for (int j = 0; j < sc.grid_size(); ++j) {
    a.index_map.push_back(static_cast<std::size_t>(sc.shifted_cell(j, h)));
    const long long c = sc.chi_at_cell(j, h);
    auto it = powers.find(c);
    if (it == powers.end()) it = powers.emplace(c, action.gamma_power(c)).first;
    a.actions.push_back(it->second);
  }
  return a;
}

L2Map commensurator_average(const std::vector<AveragingElement>& a, const L2Map& f) {
  if (a.empty()) throw DomainError("averaging over an empty set");
  const L2Space& l2 = *f.space;
  const std::size_t n = l2.factor_count();
  const auto& weights = l2.base()->weights();
  for (const auto& e : a) {
    if (e.index_map.size() != n) throw DomainError("index action has the wrong number of atoms");
    if (e.actions.size() != 1 && e.actions.size() != n) {
      throw DomainError("averaging element needs one isometry or one per atom");
    }
    std::vector<bool> hit(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = e.index_map[i];
      if (j >= n || hit[j] || std::abs(weights[i] - weights[j]) > 1e-15) {
        throw DomainError("index action is not a measure-preserving permutation");
      }
      hit[j] = true;
    }
    for (const auto& g : e.actions) {
      if (g.space().get() != l2.target().get()) throw DomainError("isometry acts on another space");
    }
  }
  const std::vector<double> uniform(a.size(), 1.0 / static_cast<double>(a.size()));
  std::vector<Point> values;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Point> pts;
    for (const auto& e : a) {
      const Isometry& g = e.actions.size() == 1 ? e.actions[0] : e.actions[i];
      pts.push_back(g.apply(f.value(e.index_map[i])));
    }
    values.push_back(barycenter(*l2.target(), pts, uniform).point);
  }
  return L2Map::from_values(f.space, values);
}

std::vector<double> square_integrability_estimate(const LatticeScenario& scenario,
                                                  const std::vector<GridElement>& g_samples) {
  std::vector<double> out;
  const int n = scenario.grid_size();
  for (const auto& g : g_samples) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const long long c = scenario.chi_at_cell(j, g);
      int len = 0;
      try {
        len = scenario.word_length(c);
      } catch (const DomainError& e) {
        throw DomainError(std::string(e.what()) + " (cell " + std::to_string(j) + ", g = " +
                          std::to_string(g.k) + "/" + std::to_string(n) + ")");
      }
      sum += static_cast<double>(len) * len;
    }
    out.push_back(sum / n);
  }
  return out;
}

TransferReport evanescence_transfer_check(const InducedAction& action, const L2Map& f) {
  const LatticeScenario& sc = action.scenario();
  const int n = sc.grid_size();
  const Point x = barycenter_map(f);
  const ModelSpace& target = *action.space()->target();
  const double gamma_disp = target.distance(action.gamma().apply(x), x);
  const double lattice_disp = l2_distance(induced_act(action, GridElement{n}, f), f);
  const double spread = l2_distance(f, L2Map::constant(action.space(), x));
  double shifts = 0.0;
  for (long long k = -(n - 1); k <= n - 1; ++k) {
    const double d = l2_distance(f, induced_act(action, GridElement{k}, f));
    shifts += d * d / n;
  }
  TransferReport r;
  r.displacement = make_defect(gamma_disp, lattice_disp);
  r.spread = make_defect(spread * spread, shifts);
  r.triangle = make_defect(gamma_disp, 2.0 * spread + lattice_disp);
  r.barycenter = x;
  return r;
}

}  // namespace hadamard
