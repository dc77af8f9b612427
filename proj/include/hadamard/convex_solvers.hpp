#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hadamard/model_spaces.hpp"

namespace hadamard {

inline constexpr int kDefaultHullDepth = 4;
inline constexpr std::size_t kDefaultSampleCap = 20000;

/// Finite approximation of the closed convex hull of `generators`: the
/// dyadic midpoint closure to depth `closure_depth`.
struct ConvexBody {
  SpacePtr space;
  std::vector<Point> generators;
  int closure_depth = 0;
  std::vector<Point> samples;

  double diameter() const;
};

class SampleCapError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, Point last)
      : std::runtime_error(what), last_(std::move(last)) {}
  const Point& last_iterate() const { return last_; }

 private:
  Point last_;
};

class NoFixedPointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws SampleCapError when a level would exceed `cap` samples.
ConvexBody dyadic_hull(SpacePtr space, std::vector<Point> points, int depth,
                       std::size_t cap = kDefaultSampleCap);
/// Deepest closure up to `max_depth` that fits under the cap.
ConvexBody dyadic_hull_within_cap(SpacePtr space, std::vector<Point> points,
                                  int max_depth = kDefaultHullDepth,
                                  std::size_t cap = kDefaultSampleCap);

/// Nearest point of the body: nearest sample, then descent along geodesics
/// toward nearby samples.
Point project(const ConvexBody& body, const Point& x);

struct CircumResult {
  Point center;
  double radius = 0.0;
  /// Dual lower bound on the circumradius (equals `radius` at optimality).
  double lower_bound = 0.0;
};

struct CircumOptions {
  std::uint64_t seed = 0;
  int max_iter = 4000;
};

CircumResult circumcenter(const ModelSpace& space, std::span<const Point> points,
                          const CircumOptions& options = {});

/// Largest radius decrease found by moving the center toward each point and
/// along random directions; positive values mean the center is not optimal.
double circumcenter_improvement(const ModelSpace& space, std::span<const Point> points,
                                const CircumResult& result, Rng& rng, int samples = 64);

/// sqrt(2) sqrt(rho'^2 - rho^2) - d(c', c) for E inside Ep.
DefectReport nested_circum_check(const ConvexBody& e, const ConvexBody& ep);

struct BarycenterResult {
  Point point;
  double value = 0.0;
  int iterations = 0;
};

BarycenterResult barycenter(const ModelSpace& space, std::span<const Point> points,
                            std::span<const double> weights);

/// Cyclic inductive means: x <- [x, p_i] at fraction w_i / (accumulated
/// weight), swept `sweeps` times.
Point inductive_mean(const ModelSpace& space, std::span<const Point> points,
                     std::span<const double> weights, int sweeps = 200);

double weighted_sq_sum(const ModelSpace& space, std::span<const Point> points,
                       std::span<const double> weights, const Point& x);

using SelfMap = std::function<Point(const Point&)>;

struct FixedPointOptions {
  double tol = 1e-9;
  int max_iter = 500;
  std::size_t window = 64;
  double diameter_cap = 1e6;
  int lipschitz_samples = 64;
  std::uint64_t seed = 0;
};

struct FixedPointResult {
  Point point;
  int iterations = 0;
  double residual = 0.0;
};

/// Circumcentres of sliding windows of the orbit tail.
FixedPointResult fixed_point_nonexpanding(const ModelSpace& space, const SelfMap& f,
                                          const Point& x0, const FixedPointOptions& options = {});

}  // namespace hadamard
