#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hadamard/convex_solvers.hpp"
#include "hadamard/group_actions.hpp"

namespace hadamard {

using RepPtr = std::shared_ptr<const IsometryRep>;

/// Commuting groups G_1, ..., G_n acting on one space.
class ProductAction {
 public:
  explicit ProductAction(std::vector<RepPtr> reps);

  const SpacePtr& space() const { return reps_.front()->space(); }
  std::size_t factor_count() const { return reps_.size(); }
  const IsometryRep& rep(std::size_t i) const { return *reps_.at(i); }
  /// max over generator pairs of distinct factors of d(ghx, hgx)
  double commutation_residual() const { return commutation_residual_; }

 private:
  std::vector<RepPtr> reps_;
  double commutation_residual_ = 0.0;
};

class EvanescenceDiagnostic : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ShrinkStep {
  int round = 0;
  std::size_t samples = 0;
  double diameter = 0.0;
  double slack = 0.0;
};

struct MinimalSetResult {
  ConvexBody body;
  double invariance_residual = 0.0;
  /// oscillation over the body of the displacements of the other factors
  double oscillation = 0.0;
  std::vector<ShrinkStep> shrink_log;
  std::vector<std::string> warnings;

  static MinimalSetResult from_body(ConvexBody body);
};

struct MinimalSetOptions {
  int ball_radius = 4;
  int hull_depth = 2;
  std::size_t sample_cap = 4000;
  int max_rounds = 20;
  double slack = 1e-9;
  double orbit_cap = 1e6;
};

MinimalSetResult minimal_invariant_set(const ProductAction& action, std::size_t factor,
                                       const Point& seed, const MinimalSetOptions& options = {});

struct ParallelReport {
  bool parallel = false;
  double d0 = 0.0;
  double oscillation = 0.0;
  /// lhs = worst |d(phi x, phi y) - d(x, y)| over sample pairs
  DefectReport isometry;
};

ParallelReport parallel_transport_check(const MinimalSetResult& c, const MinimalSetResult& cp);

/// lhs = max over x in C1 of d(p_C1 p_C3 p_C2 x, x); rhs = 0.
DefectReport holonomy_check(const MinimalSetResult& c1, const MinimalSetResult& c2,
                            const MinimalSetResult& c3);

struct SplittingResult {
  std::vector<MinimalSetResult> components;
  double pythagoras_residual = 0.0;
  double holonomy_residual = 0.0;
  double star_residual = 0.0;
  double equivariance_residual = 0.0;
  std::vector<std::string> diagnostics;
};

struct SplittingOptions {
  MinimalSetOptions minimal;
  int test_pairs = 1000;
  int max_components = 16;
  std::uint64_t seed = 0;
};

SplittingResult build_splitting(const ProductAction& action, const std::vector<Point>& seeds,
                                const SplittingOptions& options = {});

/// (p_{Z1}(x), index of the component nearest to x)
std::pair<Point, std::size_t> splitting_map(const SplittingResult& result, const Point& x);

}  // namespace hadamard
