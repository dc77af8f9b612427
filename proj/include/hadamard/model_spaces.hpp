#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hadamard/metric_core.hpp"

namespace hadamard {

class EuclideanSpace final : public ModelSpace {
 public:
  explicit EuclideanSpace(int dim);

  int dim() const { return dim_; }

  SpaceKind kind() const override { return SpaceKind::euclidean; }
  std::string name() const override;
  Eigen::Index coord_size() const override { return dim_; }

  double coord_distance(const Vector& x, const Vector& y) const override;
  Vector coord_geodesic(const Vector& x, const Vector& y, double t) const override;
  bool coord_contains(const Vector& x) const override;
  Vector coord_base() const override { return Vector::Zero(dim_); }
  Vector coord_random(Rng& rng, const Vector& center, double scale) const override;
  std::vector<Vector> coord_spread(const Vector& from, double radius, int count,
                                   Rng& rng) const override;

 private:
  int dim_;
};

/// Hyperboloid model {x : <x,x> = -1, x0 > 0} with the Minkowski form
/// <x,y> = -x0 y0 + sum xi yi. Results are renormalized onto the sheet by
/// recomputing x0 from the spatial coordinates.
class HyperbolicSpace final : public ModelSpace {
 public:
  explicit HyperbolicSpace(int dim);

  int dim() const { return dim_; }

  SpaceKind kind() const override { return SpaceKind::hyperbolic; }
  std::string name() const override;
  Eigen::Index coord_size() const override { return dim_ + 1; }

  double coord_distance(const Vector& x, const Vector& y) const override;
  Vector coord_geodesic(const Vector& x, const Vector& y, double t) const override;
  bool coord_contains(const Vector& x) const override;
  Vector coord_canonical(const Vector& x) const override { return renormalize(x); }
  Vector coord_base() const override;
  Vector coord_random(Rng& rng, const Vector& center, double scale) const override;
  std::vector<Vector> coord_spread(const Vector& from, double radius, int count,
                                   Rng& rng) const override;

  static double minkowski(const Vector& x, const Vector& y);
  static Vector renormalize(const Vector& x);
  /// Point with the given spatial coordinates.
  Vector lift(const Vector& spatial) const;
  /// Riemannian logarithm: tangent vector at x pointing to y of Minkowski norm d(x,y).
  Vector log_map(const Vector& x, const Vector& y) const;
  Vector exp_map(const Vector& x, const Vector& v) const;

 private:
  int dim_;
};

/// A finite metric tree. Points are (edge id, offset from the edge's first
/// vertex); vertices are canonicalized onto their lowest-index incident edge.
class MetricTree final : public ModelSpace {
 public:
  struct Edge {
    int u;
    int v;
    double length;
  };

  MetricTree(int vertex_count, std::vector<Edge> edges);

  int vertex_count() const { return vertex_count_; }
  const std::vector<Edge>& edges() const { return edges_; }
  /// Edge joining u and v, or -1.
  int edge_between(int u, int v) const;
  double vertex_distance(int u, int v) const;
  std::vector<int> vertex_path(int from, int to) const;
  std::vector<int> leaves() const;
  Point vertex_point(int v) const { return wrap(vertex_coords(v)); }
  Vector vertex_coords(int v) const;
  Vector edge_coords(int edge, double offset) const;
  /// Distance from the point to vertex v.
  double coord_vertex_distance(const Vector& x, int v) const;

  SpaceKind kind() const override { return SpaceKind::tree; }
  std::string name() const override;
  Eigen::Index coord_size() const override { return 2; }

  double coord_distance(const Vector& x, const Vector& y) const override;
  Vector coord_geodesic(const Vector& x, const Vector& y, double t) const override;
  bool coord_contains(const Vector& x) const override;
  Vector coord_canonical(const Vector& x) const override;
  Vector coord_base() const override { return vertex_coords(0); }
  Vector coord_random(Rng& rng, const Vector& center, double scale) const override;
  std::vector<Vector> coord_spread(const Vector& from, double radius, int count,
                                   Rng& rng) const override;

  static std::shared_ptr<MetricTree> star(std::span<const double> leg_lengths);
  static std::shared_ptr<MetricTree> path(int edge_count, double edge_length);

 private:
  struct Route {
    double length;
    int exit_vertex;   // vertex through which x leaves its edge (-1: same edge)
    int entry_vertex;  // vertex through which y's edge is entered
  };
  Route route(const Vector& x, const Vector& y) const;

  int vertex_count_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> incident_;
  Matrix vertex_dist_;
  std::vector<std::vector<int>> parent_;  // parent_[root][v] in the tree rooted at root
};

/// Symmetric positive definite n x n matrices with the affine-invariant
/// metric d(A,B) = |log(A^{-1/2} B A^{-1/2})|_F. Payloads are column-major.
class SpdSpace final : public ModelSpace {
 public:
  explicit SpdSpace(int n);

  int n() const { return n_; }

  SpaceKind kind() const override { return SpaceKind::spd; }
  std::string name() const override;
  Eigen::Index coord_size() const override { return static_cast<Eigen::Index>(n_) * n_; }

  double coord_distance(const Vector& x, const Vector& y) const override;
  Vector coord_geodesic(const Vector& x, const Vector& y, double t) const override;
  std::function<Vector(double)> coord_geodesic_path(const Vector& x,
                                                    const Vector& y) const override;
  bool coord_contains(const Vector& x) const override;
  Vector coord_canonical(const Vector& x) const override;
  Vector coord_base() const override;
  Vector coord_random(Rng& rng, const Vector& center, double scale) const override;
  std::vector<Vector> coord_spread(const Vector& from, double radius, int count,
                                   Rng& rng) const override;

  Matrix to_matrix(const Vector& x) const;
  Vector to_coords(const Matrix& m) const;
  /// Whitened logarithm log(A^{-1/2} B A^{-1/2}).
  Matrix whitened_log(const Matrix& a, const Matrix& b) const;
  /// A^{1/2} exp(S) A^{1/2} for symmetric S.
  Matrix whitened_exp(const Matrix& a, const Matrix& s) const;

 private:
  int n_;
};

/// Weighted l2 product: d² = sum_i w_i d_i². Plain products use unit weights.
class ProductSpace : public ModelSpace {
 public:
  explicit ProductSpace(std::vector<SpacePtr> factors, std::vector<double> weights = {});

  std::size_t factor_count() const { return factors_.size(); }
  const SpacePtr& factor(std::size_t i) const { return factors_.at(i); }
  const std::vector<SpacePtr>& factors() const { return factors_; }
  const std::vector<double>& weights() const { return weights_; }
  Eigen::Index offset(std::size_t i) const { return offsets_.at(i); }

  Point component(std::size_t i, const Point& x) const;
  Vector coord_component(std::size_t i, const Vector& x) const;
  Point assemble(std::span<const Point> components) const;

  SpaceKind kind() const override { return SpaceKind::product; }
  std::string name() const override;
  Eigen::Index coord_size() const override { return total_size_; }

  double coord_distance(const Vector& x, const Vector& y) const override;
  Vector coord_geodesic(const Vector& x, const Vector& y, double t) const override;
  bool coord_contains(const Vector& x) const override;
  Vector coord_canonical(const Vector& x) const override;
  Vector coord_base() const override;
  Vector coord_random(Rng& rng, const Vector& center, double scale) const override;
  std::vector<Vector> coord_spread(const Vector& from, double radius, int count,
                                   Rng& rng) const override;

 private:
  std::vector<SpacePtr> factors_;
  std::vector<double> weights_;
  std::vector<Eigen::Index> offsets_;
  Eigen::Index total_size_ = 0;
};

/// Nearest-point projection onto the slice in which every factor except `keep`
/// is frozen at the corresponding factor of `anchor`.
Point product_slice_project(const ProductSpace& space, std::size_t keep, const Point& anchor,
                            const Point& x);

/// The i-th component of a point of a product space.
Point product_space_project(const ModelSpace& space, std::size_t i, const Point& x);

SpacePtr make_euclidean(int dim);
SpacePtr make_hyperbolic(int dim);
SpacePtr make_tree(int vertex_count, std::vector<MetricTree::Edge> edges);
SpacePtr make_spd(int n);
SpacePtr make_product(std::vector<SpacePtr> factors);

/// Runs a fixed-seed CN self-test; throws ConstructionError on a violation.
void self_test(const ModelSpace& space, int trials = 100);

}  // namespace hadamard
