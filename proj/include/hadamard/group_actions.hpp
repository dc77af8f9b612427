#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hadamard/isometry.hpp"

namespace hadamard {

/// A word in the generators of an IsometryRep, as generator indices.
using Word = std::vector<std::size_t>;

/// Finitely generated group of isometries. Formal inverses are appended as
/// "<name>^-1" unless a generator is an involution.
class IsometryRep {
 public:
  struct Generator {
    std::string name;
    Isometry map;
    std::size_t inverse = 0;
  };

  IsometryRep(SpacePtr space, std::vector<std::pair<std::string, Isometry>> generators,
              int word_cap = 8);

  const SpacePtr& space() const { return space_; }
  int word_cap() const { return word_cap_; }
  std::size_t size() const { return generators_.size(); }
  const Generator& generator(std::size_t i) const { return generators_.at(i); }
  const std::vector<Generator>& generators() const { return generators_; }
  /// Indices of the generators passed to the constructor (inverses excluded).
  const std::vector<std::size_t>& primary() const { return primary_; }
  std::optional<std::size_t> find(const std::string& name) const;

  Word parse(const std::vector<std::string>& names) const;
  Isometry evaluate(const Word& word) const;
  Point act(const Word& word, const Point& x) const;
  /// Words of length <= radius with pairwise distinct actions, shortest first.
  std::vector<Word> word_ball(int radius) const;

 private:
  SpacePtr space_;
  std::vector<Generator> generators_;
  std::vector<std::size_t> primary_;
  int word_cap_;
};

double displacement(const Isometry& g, const Point& x);
double displacement(const IsometryRep& rep, const Word& word, const Point& x);
/// sup over q in Q of d(qx, x).
double sup_displacement(const IsometryRep& rep, const std::vector<std::size_t>& q, const Point& x);

struct CliffordReport {
  bool is_clifford = false;
  double displacement = 0.0;
  double min_displacement = 0.0;
  double max_displacement = 0.0;
  std::optional<Vector> translation;
};

CliffordReport detect_clifford(const Isometry& g, int sample_budget = 64, std::uint64_t seed = 0);

enum class Verdict { evanescent_witness, non_evanescent_fit, inconclusive };

std::string to_string(Verdict v);

struct EvanescenceVerdict {
  Verdict verdict = Verdict::inconclusive;
  std::vector<Point> witness;
  /// displacement bound along the witness
  double bound = 0.0;
  double lambda = 0.0;
  double d0 = 0.0;
  /// worst violation of D >= lambda d - d0 over the samples (<= 0 when valid)
  double fit_violation = 0.0;
};

struct ProbeOptions {
  int directions = 64;
  double slack = 1e-6;
  std::uint64_t seed = 0;
};

EvanescenceVerdict evanescence_probe(const IsometryRep& rep, const std::vector<std::size_t>& q,
                                     const Point& x0, const std::vector<double>& radii,
                                     const ProbeOptions& options = {});

struct LadderResult {
  std::vector<Point> points;
  std::vector<double> displacements;
  /// max over the second half of the ladder
  double limsup = 0.0;
  bool bounded = false;
};

/// x_n on [x0, y_n] at distance n from x0; accepted when the displacements do
/// not grow beyond the first rung.
LadderResult evanescent_ladder(const ModelSpace& space, const Point& x0,
                               const std::vector<Point>& y_points,
                               const std::function<double(const Point&)>& displacement_of,
                               double slack = 1e-6);
LadderResult evanescent_ladder(const IsometryRep& rep, const std::vector<std::size_t>& q,
                               const Point& x0, const std::vector<Point>& y_points,
                               double slack = 1e-6);

}  // namespace hadamard
