#pragma once

#include <string>
#include <vector>

#include "hadamard/convex_solvers.hpp"

namespace hadamard {

/// One aggregated property check: passes iff defect >= -tolerance. Residual
/// checks store the negated residual as the defect.
struct Check {
  std::string name;
  double defect = 0.0;
  double tolerance = 0.0;
  std::size_t trials = 0;
  std::string detail;

  bool passed() const { return defect >= -tolerance; }
};

struct NamedSpace {
  std::string label;
  SpacePtr space;
};

/// The curated spaces: Euclidean 2 and 3, hyperbolic plane, three trees,
/// SPD(2) and two products.
std::vector<NamedSpace> standard_spaces();
/// Throws DomainError for an unknown label.
SpacePtr standard_space(const std::string& label);

Check cn_suite(const ModelSpace& space, std::size_t trials, std::uint64_t seed);
/// max |CN defect| in a Euclidean space, where CN is an equality
Check cn_equality_suite(const ModelSpace& space, std::size_t trials, std::uint64_t seed);
Check reshetnyak_suite(const ModelSpace& space, std::size_t trials, double eps, std::uint64_t seed);
Check geodesic_suite(const ModelSpace& space, std::size_t trials, std::uint64_t seed);
Check metric_suite(const ModelSpace& space, std::size_t trials, std::uint64_t seed);
/// Bodies are segments, plus triangles where hulls are geodesic polygons; in
/// curved spaces of dimension >= 3 the hull of three points has curved faces
/// that descent over samples does not reach, and in products with a tree
/// factor descent stalls on the branch locus.
Check projection_suite(const SpacePtr& space, std::size_t trials, std::uint64_t seed);
Check nested_circum_suite(const SpacePtr& space, std::size_t trials, std::uint64_t seed);
/// d(bar, bar') <= sum w_i d(x_i, x'_i)
Check bary_contraction_suite(const ModelSpace& space, std::size_t trials, std::uint64_t seed);
/// d²(bar, bar') <= sum w_i d²(x_i, x'_i) - sum w_i (d(x_i, x'_i) - d(bar, bar'))²
Check bary_strengthened_suite(const ModelSpace& space, std::size_t trials, std::uint64_t seed);
Check euclidean_mean_suite(const ModelSpace& space, std::size_t trials, std::uint64_t seed);

/// Every applicable suite above for one space, `trials` instances each
/// (at most 1000 for the projection and nested-hull suites).
std::vector<Check> fuzz_space(const NamedSpace& space, std::size_t trials, std::uint64_t seed);

}  // namespace hadamard
