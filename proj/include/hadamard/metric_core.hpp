#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "hadamard/random.hpp"

namespace hadamard {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Absolute tolerance for comparison-inequality defects.
inline constexpr double kDefectTolerance = 1e-9;
/// Absolute tolerance for coordinate membership predicates.
inline constexpr double kMembershipTolerance = 1e-12;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ConstructionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class SpaceId : std::uint64_t {};

/// A point of a model space. The meaning of `coords` is owned by the space:
/// Euclidean vector, Minkowski vector on the hyperboloid, (edge, offset) on a
/// tree, column-major SPD matrix, or the concatenation of factor payloads.
struct Point {
  SpaceId space_id{};
  Vector coords;
};

enum class SpaceKind { euclidean, hyperbolic, tree, spd, product, l2 };

std::string to_string(SpaceKind kind);

/// A complete CAT(0) space with closed-form distance and geodesics.
///
/// Instances are immutable once constructed and are shared through
/// `SpacePtr`. Public entry points validate that points belong to the space;
/// the `coord_*` functions operate on raw payloads and skip that check so that
/// product spaces can evaluate factors on coordinate slices.
class ModelSpace {
 public:
  ModelSpace();
  virtual ~ModelSpace() = default;
  ModelSpace(const ModelSpace&) = delete;
  ModelSpace& operator=(const ModelSpace&) = delete;

  SpaceId id() const { return id_; }

  virtual SpaceKind kind() const = 0;
  virtual std::string name() const = 0;
  virtual Eigen::Index coord_size() const = 0;

  double distance(const Point& x, const Point& y) const;
  /// Point at arc-length fraction t in [0,1] of the geodesic from x to y.
  Point geodesic_point(const Point& x, const Point& y, double t) const;
  bool contains(const Point& x) const;

  /// Validates and canonicalizes a raw payload into a point of this space.
  Point make_point(Vector coords) const;
  /// A distinguished base point (origin, identity matrix, vertex 0, ...).
  Point base_point() const { return wrap(coord_base()); }
  /// Random point within distance ~scale of center.
  Point random_point(Rng& rng, const Point& center, double scale) const;
  /// Points at distance `radius` from `from` in well spread directions. On
  /// bounded spaces a direction may terminate early; callers read off the
  /// attained distance.
  std::vector<Point> spread(const Point& from, double radius, int count, Rng& rng) const;

  virtual double coord_distance(const Vector& x, const Vector& y) const = 0;
  virtual Vector coord_geodesic(const Vector& x, const Vector& y, double t) const = 0;
  /// t -> geodesic point from x to y, for repeated evaluation along one geodesic.
  virtual std::function<Vector(double)> coord_geodesic_path(const Vector& x, const Vector& y) const {
    return [this, x, y](double t) { return coord_geodesic(x, y, t); };
  }
  virtual bool coord_contains(const Vector& x) const = 0;
  virtual Vector coord_canonical(const Vector& x) const { return x; }
  virtual Vector coord_base() const = 0;
  virtual Vector coord_random(Rng& rng, const Vector& center, double scale) const = 0;
  virtual std::vector<Vector> coord_spread(const Vector& from, double radius, int count,
                                           Rng& rng) const = 0;

  Point wrap(Vector coords) const { return Point{id_, std::move(coords)}; }
  void require_member(const Point& x) const;

 private:
  SpaceId id_;
};

using SpacePtr = std::shared_ptr<const ModelSpace>;

/// Unit-speed geodesic segment, parametrized by arc-length fraction.
class GeodesicSegment {
 public:
  GeodesicSegment(SpacePtr space, Point start, Point end);

  const Point& start() const { return start_; }
  const Point& end() const { return end_; }
  double length() const { return length_; }
  Point at(double t) const;

 private:
  SpacePtr space_;
  Point start_;
  Point end_;
  double length_;
};

/// One evaluation of an inequality `lhs <= rhs`; `defect = rhs - lhs`.
struct DefectReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double defect = 0.0;
};

DefectReport make_defect(double lhs, double rhs);

double distance(const ModelSpace& space, const Point& x, const Point& y);
Point geodesic_point(const ModelSpace& space, const Point& x, const Point& y, double t);

/// Bruhat-Tits CN inequality for the midpoint m of [c, cp]:
/// 2 d²(m,x) <= d²(cp,x) + d²(c,x) - d²(cp,c)/2.
DefectReport check_cn(const ModelSpace& space, const Point& x, const Point& c, const Point& cp);

/// Reshetnyak quadrilateral inequality with x_eps, xp_eps taken on [x, xp] at
/// distance eps*d(x,xp) from x and from xp respectively.
DefectReport check_reshetnyak(const ModelSpace& space, const Point& x, const Point& xp,
                              const Point& y, const Point& yp, double eps);

}  // namespace hadamard
