#pragma once

#include <variant>
#include <vector>

#include "hadamard/model_spaces.hpp"

namespace hadamard {

class Isometry;

/// x -> linear * x + translation with orthogonal `linear`.
struct EuclideanMotion {
  Matrix linear;
  Vector translation;
};

/// Lorentz matrix preserving the upper sheet of the hyperboloid.
struct LorentzTransform {
  Matrix matrix;
};

/// Vertex bijection preserving edges and edge lengths.
struct TreeAutomorphism {
  std::vector<int> vertex_map;
};

/// A -> G A G^T with invertible G.
struct Congruence {
  Matrix factor;
};

/// Factor-preserving tuple of isometries of a product.
struct FactorwiseIsometry {
  std::vector<Isometry> factors;
};

using IsometryPayload =
    std::variant<EuclideanMotion, LorentzTransform, TreeAutomorphism, Congruence, FactorwiseIsometry>;

/// An isometry of a model space. Construction validates invertibility and
/// distance preservation on random pairs (within 1e-9, relative to scale).
class Isometry {
 public:
  Isometry(SpacePtr space, IsometryPayload payload);

  static Isometry identity(SpacePtr space);

  const SpacePtr& space() const { return space_; }
  const IsometryPayload& payload() const { return payload_; }

  Point apply(const Point& x) const;
  Vector apply_coords(const Vector& x) const;
  /// (*this) o inner
  Isometry compose(const Isometry& inner) const;
  Isometry inverse() const;
  Isometry power(int n) const;

 private:
  struct Unchecked {};
  Isometry(SpacePtr space, IsometryPayload payload, Unchecked);
  void validate() const;

  SpacePtr space_;
  IsometryPayload payload_;
};

Point apply_isometry(const Isometry& g, const Point& x);

/// Rotation of the (i, j) coordinate plane by `angle` about `center`.
Isometry euclidean_rotation(SpacePtr space, double angle, const Vector& center, int i = 0,
                            int j = 1);
Isometry euclidean_translation(SpacePtr space, const Vector& v);
/// Boost along spatial axis `axis` (1-based) by hyperbolic distance `length`;
/// it translates the geodesic through the base point along that axis.
Isometry hyperbolic_boost(SpacePtr space, int axis, double length);
/// Rotation of spatial coordinates i, j (1-based) about the base point.
Isometry hyperbolic_rotation(SpacePtr space, double angle, int i = 1, int j = 2);

}  // namespace hadamard
