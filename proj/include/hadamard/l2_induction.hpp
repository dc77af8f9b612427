#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hadamard/convex_solvers.hpp"
#include "hadamard/isometry.hpp"

namespace hadamard {

/// Finitely many atoms with positive weights summing to one.
class FiniteMeasureSpace {
 public:
  FiniteMeasureSpace(std::vector<std::string> atoms, std::vector<double> weights);
  static std::shared_ptr<const FiniteMeasureSpace> uniform(std::size_t n);

  std::size_t size() const { return weights_.size(); }
  const std::vector<std::string>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_.at(i); }

 private:
  std::vector<std::string> atoms_;
  std::vector<double> weights_;
};

using MeasurePtr = std::shared_ptr<const FiniteMeasureSpace>;

/// L²(F, X) for a finite measure space F: the weighted product of one copy of
/// X per atom.
class L2Space final : public ProductSpace {
 public:
  L2Space(MeasurePtr base, SpacePtr target);

  const MeasurePtr& base() const { return base_; }
  const SpacePtr& target() const { return target_; }

  SpaceKind kind() const override { return SpaceKind::l2; }
  std::string name() const override;

 private:
  MeasurePtr base_;
  SpacePtr target_;
};

using L2Ptr = std::shared_ptr<const L2Space>;

L2Ptr make_l2(MeasurePtr base, SpacePtr target);

/// A map from the atoms into the target, stored as a point of L²(F, X).
struct L2Map {
  L2Ptr space;
  Point point;

  static L2Map from_values(L2Ptr space, const std::vector<Point>& values);
  /// The constant map with value x.
  static L2Map constant(L2Ptr space, const Point& x);

  std::size_t size() const { return space->factor_count(); }
  Point value(std::size_t i) const { return space->component(i, point); }
  std::vector<Point> values() const;
};

struct SemiDensity {
  MeasurePtr base;
  Vector alpha;

  /// sum of mu_i alpha_i^2
  double mass() const;
};

double l2_distance(const L2Map& f, const L2Map& fp);

struct L2GeodesicPoint {
  L2Map map;
  SemiDensity alpha;
};

L2GeodesicPoint l2_geodesic(const L2Map& f, const L2Map& fp, double t);

/// Speeds of the component geodesics of the L² geodesic from f through g.
SemiDensity decompose_geodesic(const L2Map& f, const L2Map& g);

struct RectangleReport {
  std::vector<double> oscillation;
  std::vector<double> alpha_gap;
  std::vector<DefectReport> per_atom;
  double flatness = 0.0;
};

/// Per-atom checks for two geodesics sigma1 = [a1, b1], sigma2 = [a2, b2]
/// bounding a flat rectangle in L². Throws PreconditionError if the sides are
/// not parallel.
RectangleReport rectangle_check(const L2Map& a1, const L2Map& b1, const L2Map& a2,
                                const L2Map& b2, int t_samples = 11);

Point barycenter_map(const L2Map& f);

/// Grid element h = k / N of G = R.
struct GridElement {
  long long k = 0;
};

/// Gamma = Z inside G = R with fundamental domain F = [0,1) cut into N cells
/// centred at (j + 1/2) / N. Word lengths are taken for the generating set
/// {±s : s in steps}.
class LatticeScenario {
 public:
  LatticeScenario(int grid_size, std::vector<long long> steps = {1}, int word_cap = 64);

  int grid_size() const { return n_; }
  int word_cap() const { return word_cap_; }
  const std::vector<long long>& steps() const { return steps_; }
  double cell_center(int j) const { return (j + 0.5) / n_; }
  GridElement grid_element(double h) const;

  /// chi(g) = -floor(g): the lattice element with g + chi(g) in F.
  long long chi_at_cell(int j, GridElement h) const;
  /// Cell containing (g_j - h) + chi(g_j - h).
  int shifted_cell(int j, GridElement h) const;
  /// Word length of n; throws DomainError beyond the word cap.
  int word_length(long long n) const;

 private:
  int n_;
  std::vector<long long> steps_;
  int word_cap_;
  std::vector<int> lengths_;  // lengths_[n + offset_]
  long long offset_ = 0;
};

/// The G-action on L²(F, X) induced from Z acting on X through `gamma`.
class InducedAction {
 public:
  InducedAction(LatticeScenario scenario, SpacePtr target, Isometry gamma);

  const LatticeScenario& scenario() const { return scenario_; }
  const L2Ptr& space() const { return space_; }
  const Isometry& gamma() const { return gamma_; }
  Isometry gamma_power(long long n) const { return gamma_.power(static_cast<int>(n)); }

 private:
  LatticeScenario scenario_;
  L2Ptr space_;
  Isometry gamma_;
};

/// (h.f)(g) = chi(g - h) f((g - h) + chi(g - h)).
L2Map induced_act(const InducedAction& action, GridElement h, const L2Map& f);
L2Map induced_act(const InducedAction& action, double h, const L2Map& f);

/// An element of the averaging set: a measure-preserving permutation of the
/// atoms and the isometries applied to the permuted values (one shared or one
/// per atom).
struct AveragingElement {
  std::vector<std::size_t> index_map;
  std::vector<Isometry> actions;
};

/// (F_A f)(i) = barycentre over a in A of a_i f(a(i)), uniform weights.
L2Map commensurator_average(const std::vector<AveragingElement>& a, const L2Map& f);

/// Averaging element of the grid shift by k cells, with the cocycle applied
/// on wrapped cells.
AveragingElement shift_element(const InducedAction& action, GridElement h);

std::vector<double> square_integrability_estimate(const LatticeScenario& scenario,
                                                  const std::vector<GridElement>& g_samples);

struct TransferReport {
  /// d(gamma x_f, x_f) <= d(f, 1.f)
  DefectReport displacement;
  /// d²(f, psi_{x_f}) <= sum over |k| < N of d²(f, (k/N).f) / N
  DefectReport spread;
  /// d(gamma x_f, x_f) <= 2 d(f, psi_{x_f}) + d(f, 1.f)
  DefectReport triangle;
  Point barycenter;
};

TransferReport evanescence_transfer_check(const InducedAction& action, const L2Map& f);

}  // namespace hadamard
