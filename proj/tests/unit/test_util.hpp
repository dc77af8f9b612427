#pragma once

#include <gtest/gtest.h>

#include <cmath>
#include <initializer_list>

#include "hadamard/metric_core.hpp"

namespace hadamard::testing {

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline Point pt(const ModelSpace& s, std::initializer_list<double> v) { return s.make_point(vec(v)); }

/// Hyperbolic plane point at polar coordinates (r, theta) around the base point.
inline Point hyp(const ModelSpace& s, double r, double theta) {
  return s.make_point(vec({std::cosh(r), std::sinh(r) * std::cos(theta), std::sinh(r) * std::sin(theta)}));
}

inline Point tree_pt(const ModelSpace& s, int edge, double offset) {
  return s.make_point(vec({static_cast<double>(edge), offset}));
}

inline Point diag(const ModelSpace& s, std::initializer_list<double> d) {
  const auto n = static_cast<Eigen::Index>(d.size());
  Matrix m = Matrix::Zero(n, n);
  Eigen::Index i = 0;
  for (double x : d) {
    m(i, i) = x;
    ++i;
  }
  return s.make_point(Eigen::Map<const Vector>(m.data(), n * n));
}

inline void expect_coords(const Point& p, std::initializer_list<double> want, double tol) {
  const Vector w = vec(want);
  ASSERT_EQ(p.coords.size(), w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) EXPECT_NEAR(p.coords[i], w[i], tol) << "coordinate " << i;
}

}  // namespace hadamard::testing
