#include "hadamard/group_actions.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hadamard {

namespace {

bool acts_like(const Isometry& a, const Isometry& b, const ModelSpace& s) {
  Rng rng(0x1d);
  const Point base = s.base_point();
  for (int k = 0; k < 8; ++k) {
    const Point x = k == 0 ? base : s.random_point(rng, base, 3.0);
    if (s.distance(a.apply(x), b.apply(x)) > 1e-9) return false;
  }
  return true;
}

}  // namespace

IsometryRep::IsometryRep(SpacePtr space, std::vector<std::pair<std::string, Isometry>> generators,
                         int word_cap)
    : space_(std::move(space)), word_cap_(word_cap) {
  if (word_cap_ < 0) throw ConstructionError("negative word cap");
  const Isometry id = Isometry::identity(space_);
  for (auto& [name, g] : generators) {
    if (g.space().get() != space_.get()) {
      throw ConstructionError("generator " + name + " acts on a different space");
    }
    if (find(name)) throw ConstructionError("duplicate generator name " + name);
    const std::size_t i = generators_.size();
    primary_.push_back(i);
    const Isometry inv = g.inverse();
    if (!acts_like(g.compose(inv), id, *space_)) {
      throw ConstructionError("generator " + name + " does not compose with its inverse to 1");
    }
    if (acts_like(g, inv, *space_)) {
      generators_.push_back({name, g, i});
    } else {
      generators_.push_back({name, g, i + 1});
      generators_.push_back({name + "^-1", inv, i});
    }
  }
}

std::optional<std::size_t> IsometryRep::find(const std::string& name) const {
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    if (generators_[i].name == name) return i;
  }
  return std::nullopt;
}

Word IsometryRep::parse(const std::vector<std::string>& names) const {
  Word w;
  for (const auto& n : names) {
    const auto i = find(n);
    if (!i) throw DomainError("unknown generator " + n);
    w.push_back(*i);
  }
  return w;
}

Isometry IsometryRep::evaluate(const Word& word) const {
  if (static_cast<int>(word.size()) > word_cap_) {
    throw DomainError("word of length " + std::to_string(word.size()) + " exceeds the cap " +
                      std::to_string(word_cap_));
  }
  Isometry out = Isometry::identity(space_);
  for (auto it = word.rbegin(); it != word.rend(); ++it) out = generator(*it).map.compose(out);
  return out;
}

Point IsometryRep::act(const Word& word, const Point& x) const {
  if (static_cast<int>(word.size()) > word_cap_) {
    throw DomainError("word of length " + std::to_string(word.size()) + " exceeds the cap " +
                      std::to_string(word_cap_));
  }
  Point y = x;
  for (auto it = word.rbegin(); it != word.rend(); ++it) y = generator(*it).map.apply(y);
  return y;
}

std::vector<Word> IsometryRep::word_ball(int radius) const {
  if (radius > word_cap_) throw DomainError("word ball radius exceeds the word cap");
  Rng rng(0xba11);
  std::vector<Point> probes{space_->base_point()};
  for (int k = 0; k < 3; ++k) probes.push_back(space_->random_point(rng, probes[0], 2.0));
  auto key = [&](const Word& w) {
    std::vector<long long> k;
    for (const auto& p : probes) {
      const Point y = act(w, p);
      for (Eigen::Index i = 0; i < y.coords.size(); ++i) k.push_back(std::llround(y.coords[i] * 1e7));
    }
    return k;
  };
  std::vector<Word> ball{Word{}};
  std::set<std::vector<long long>> seen{key(Word{})};
  std::size_t begin = 0;
  for (int len = 1; len <= radius; ++len) {
    const std::size_t end = ball.size();
    for (std::size_t b = begin; b < end; ++b) {
      for (std::size_t g = 0; g < generators_.size(); ++g) {
        Word w = ball[b];
        w.insert(w.begin(), g);
        if (seen.insert(key(w)).second) ball.push_back(std::move(w));
      }
    }
    begin = end;
  }
  return ball;
}

double displacement(const Isometry& g, const Point& x) {
  return g.space()->distance(g.apply(x), x);
}

double displacement(const IsometryRep& rep, const Word& word, const Point& x) {
  return rep.space()->distance(rep.act(word, x), x);
}

double sup_displacement(const IsometryRep& rep, const std::vector<std::size_t>& q, const Point& x) {
  double d = 0.0;
  for (std::size_t i : q) d = std::max(d, displacement(rep.generator(i).map, x));
  return d;
}

CliffordReport detect_clifford(const Isometry& g, int sample_budget, std::uint64_t seed) {
  if (sample_budget < 10) throw DomainError("sample budget must be at least 10");
  const ModelSpace& s = *g.space();
  Rng rng(seed, 0xc11f);
  const Point base = s.base_point();
  const double scale = 10.0 * std::max(1.0, displacement(g, base));
  CliffordReport r;
  r.min_displacement = r.max_displacement = displacement(g, base);
  for (int k = 1; k < sample_budget; ++k) {
    const double d = displacement(g, s.random_point(rng, base, scale));
    r.min_displacement = std::min(r.min_displacement, d);
    r.max_displacement = std::max(r.max_displacement, d);
  }
  r.is_clifford = r.max_displacement - r.min_displacement <= 1e-6;
  r.displacement = displacement(g, base);
  if (r.is_clifford && s.kind() == SpaceKind::euclidean) {
    r.translation = g.apply(base).coords - base.coords;
  }
  return r;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::evanescent_witness: return "evanescent-witness";
    case Verdict::non_evanescent_fit: return "non-evanescent-fit";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

EvanescenceVerdict evanescence_probe(const IsometryRep& rep, const std::vector<std::size_t>& q,
                                     const Point& x0, const std::vector<double>& radii,
                                     const ProbeOptions& options) {
  if (radii.empty()) throw DomainError("empty radius schedule");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] > radii[i - 1])) throw DomainError("radius schedule must increase");
  }
  for (std::size_t i : q) {
    if (i >= rep.size()) throw DomainError("Q is not a subset of the generators");
  }
  const ModelSpace& s = *rep.space();
  const double base = sup_displacement(rep, q, x0);
  const double threshold = base + options.slack * (1.0 + base);

  struct Sample {
    double dist;
    double disp;
  };
  std::vector<std::vector<Sample>> rings;
  EvanescenceVerdict out;
  bool witnessed = true;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    Rng rng(options.seed, 0xe7a, k);
    const auto pts = s.spread(x0, radii[k], options.directions, rng);
    std::vector<Sample> ring;
    const Point* best = nullptr;
    double best_disp = 0.0;
    for (const auto& y : pts) {
      const double dist = s.distance(y, x0);
      const double disp = sup_displacement(rep, q, y);
      ring.push_back({dist, disp});
      if (dist >= 0.99 * radii[k] && disp <= threshold && (!best || disp < best_disp)) {
        best = &y;
        best_disp = disp;
      }
    }
    if (best) {
      out.witness.push_back(*best);
      out.bound = std::max(out.bound, best_disp);
    } else {
      witnessed = false;
    }
    rings.push_back(std::move(ring));
  }
  if (witnessed) {
    out.verdict = Verdict::evanescent_witness;
    return out;
  }
  out.witness.clear();
  out.bound = 0.0;

  double lambda = std::numeric_limits<double>::infinity();
  for (const auto& smp : rings.back()) {
    if (smp.dist >= 0.99 * radii.back()) lambda = std::min(lambda, smp.disp / smp.dist);
  }
  if (!std::isfinite(lambda) || lambda <= 1e-9) {
    out.verdict = Verdict::inconclusive;
    return out;
  }
  double d0 = 0.0;
  for (const auto& ring : rings) {
    for (const auto& smp : ring) d0 = std::max(d0, lambda * smp.dist - smp.disp);
  }
  out.verdict = Verdict::non_evanescent_fit;
  out.lambda = lambda;
  out.d0 = d0;
  double violation = -std::numeric_limits<double>::infinity();
  for (const auto& ring : rings) {
    for (const auto& smp : ring) violation = std::max(violation, lambda * smp.dist - d0 - smp.disp);
  }
  out.fit_violation = violation;
  return out;
}

LadderResult evanescent_ladder(const ModelSpace& space, const Point& x0,
                               const std::vector<Point>& y_points,
                               const std::function<double(const Point&)>& displacement_of,
                               double slack) {
  LadderResult out;
  for (std::size_t n = 1; n <= y_points.size(); ++n) {
    const Point& y = y_points[n - 1];
    const double d = space.distance(x0, y);
    if (d < static_cast<double>(n)) {
      throw DomainError("ladder point " + std::to_string(n) + " is closer than " +
                        std::to_string(n) + " to x0");
    }
    const Point x = space.geodesic_point(x0, y, static_cast<double>(n) / d);
    out.displacements.push_back(displacement_of(x));
    out.points.push_back(x);
  }
  if (out.points.empty()) return out;
  const std::size_t half = out.displacements.size() / 2;
  out.limsup = *std::max_element(out.displacements.begin() + half, out.displacements.end());
  const double first = out.displacements.front();
  const double top = *std::max_element(out.displacements.begin(), out.displacements.end());
  out.bounded = top <= first + slack * (1.0 + first);
  return out;
}

LadderResult evanescent_ladder(const IsometryRep& rep, const std::vector<std::size_t>& q,
                               const Point& x0, const std::vector<Point>& y_points, double slack) {
  return evanescent_ladder(*rep.space(), x0, y_points,
                           [&](const Point& x) { return sup_displacement(rep, q, x); }, slack);
}

}  // namespace hadamard
