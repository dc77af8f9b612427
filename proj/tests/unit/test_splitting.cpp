#include <gtest/gtest.h>

#include <cmath>

#include "hadamard/isometry.hpp"
#include "hadamard/model_spaces.hpp"
#include "hadamard/splitting.hpp"
#include "test_util.hpp"

using namespace hadamard;
using namespace hadamard::testing;

namespace {

RepPtr rep_of(const Isometry& g, const std::string& name) {
  return std::make_shared<IsometryRep>(g.space(), std::vector<std::pair<std::string, Isometry>>{{name, g}});
}

double farthest_from(const ModelSpace& s, const ConvexBody& b, const Point& x) {
  double d = 0;
  for (const auto& p : b.samples) d = std::max(d, s.distance(p, x));
  return d;
}

MinimalSetResult line_slice(const SpacePtr& s, const Vector& a, const Vector& b) {
  return MinimalSetResult::from_body(dyadic_hull(s, {s->make_point(a), s->make_point(b)}, 3));
}

}  // namespace

TEST(MinimalSet, QuarterTurnsShrinkToTheCentre) {
  const SpacePtr e2 = make_euclidean(2);
  const ProductAction act({rep_of(euclidean_rotation(e2, M_PI / 2, vec({0, 0})), "a"),
                           rep_of(Isometry::identity(e2), "e")});
  const MinimalSetResult r = minimal_invariant_set(act, 0, pt(*e2, {1, 0}));
  EXPECT_LE(farthest_from(*e2, r.body, pt(*e2, {0, 0})), 1e-6);
  EXPECT_LE(r.invariance_residual, 1e-5);
}

TEST(MinimalSet, TrivialGroupKeepsTheSeed) {
  const SpacePtr e2 = make_euclidean(2);
  const ProductAction act({rep_of(Isometry::identity(e2), "e"), rep_of(Isometry::identity(e2), "f")});
  const MinimalSetResult r = minimal_invariant_set(act, 0, pt(*e2, {2, -1}));
  EXPECT_LE(farthest_from(*e2, r.body, pt(*e2, {2, -1})), 1e-12);
}

TEST(MinimalSet, ReflectionLandsOnTheMirror) {
  const SpacePtr e2 = make_euclidean(2);
  Matrix m = Matrix::Identity(2, 2);
  m(0, 0) = -1;
  const ProductAction act({rep_of(Isometry(e2, EuclideanMotion{m, vec({0, 0})}), "s"),
                           rep_of(Isometry::identity(e2), "e")});
  const MinimalSetResult r = minimal_invariant_set(act, 0, pt(*e2, {1, 5}));
  EXPECT_LE(farthest_from(*e2, r.body, pt(*e2, {0, 5})), 1e-6);
}

TEST(Parallel, HorizontalLinesAtDistanceThree) {
  const SpacePtr e2 = make_euclidean(2);
  const ParallelReport r = parallel_transport_check(line_slice(e2, vec({-2, 0}), vec({2, 0})),
                                                    line_slice(e2, vec({-2, 3}), vec({2, 3})));
  EXPECT_TRUE(r.parallel);
  EXPECT_NEAR(r.d0, 3.0, 1e-9);
  EXPECT_GE(r.isometry.defect, -1e-9);
}

TEST(Parallel, SameSetIsAtDistanceZero) {
  const SpacePtr h2 = make_hyperbolic(2);
  const MinimalSetResult c = MinimalSetResult::from_body(dyadic_hull(h2, {hyp(*h2, 1, 0), hyp(*h2, 1, 2)}, 3));
  const ParallelReport r = parallel_transport_check(c, c);
  EXPECT_TRUE(r.parallel);
  EXPECT_NEAR(r.d0, 0.0, 1e-9);
}

TEST(Parallel, TreeSlicesInTripodTimesLine) {
  const SpacePtr tripod = make_tree(4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}});
  const SpacePtr txr = make_product({tripod, make_euclidean(1)});
  auto slice = [&](double z) {
    return MinimalSetResult::from_body(dyadic_hull(
        txr, {txr->make_point(vec({0, 1, z})), txr->make_point(vec({1, 1, z})), txr->make_point(vec({2, 1, z}))}, 2));
  };
  const ParallelReport r = parallel_transport_check(slice(-0.5), slice(1.5));
  EXPECT_TRUE(r.parallel);
  EXPECT_NEAR(r.d0, 2.0, 1e-6);
  EXPECT_GE(r.isometry.defect, -1e-6);
}

TEST(Holonomy, ThreeParallelLinesInSpace) {
  const SpacePtr e3 = make_euclidean(3);
  const auto c1 = line_slice(e3, vec({-2, 0, 0}), vec({2, 0, 0}));
  const auto c2 = line_slice(e3, vec({-2, 1, 0}), vec({2, 1, 0}));
  const auto c3 = line_slice(e3, vec({-2, 0.5, 2}), vec({2, 0.5, 2}));
  EXPECT_GE(holonomy_check(c1, c2, c3).defect, -1e-5);
  EXPECT_NEAR(holonomy_check(c1, c1, c1).defect, 0.0, 1e-12);
}

TEST(Holonomy, SingletonComponents) {
  const SpacePtr e2 = make_euclidean(2);
  auto point = [&](double x, double y) { return MinimalSetResult::from_body(dyadic_hull(e2, {pt(*e2, {x, y})}, 0)); };
  EXPECT_NEAR(holonomy_check(point(0, 0), point(1, 2), point(-3, 1)).defect, 0.0, 1e-12);
}

TEST(Splitting, QuarterTurnsOnTwoPlanes) {
  const SpacePtr r4 = make_euclidean(4);
  const ProductAction act({rep_of(euclidean_rotation(r4, M_PI / 2, Vector::Zero(4), 0, 1), "a"),
                           rep_of(euclidean_rotation(r4, M_PI / 2, Vector::Zero(4), 2, 3), "b")});
  EXPECT_LE(act.commutation_residual(), 1e-12);
  const SplittingResult r = build_splitting(act, {pt(*r4, {1, 0.5, 2, 1}), pt(*r4, {0.3, -1, 0.5, 0.2})});
  EXPECT_LE(r.pythagoras_residual, 1e-6);
  EXPECT_LE(r.holonomy_residual, 1e-5);
  EXPECT_LE(r.star_residual, 1e-5);
  EXPECT_LE(r.equivariance_residual, 1e-6);
}

TEST(Splitting, TreeAutomorphismTimesReflection) {
  const SpacePtr tripod = make_tree(4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}});
  const SpacePtr line = make_euclidean(1);
  const SpacePtr txr = make_product({tripod, line});
  Matrix flip(1, 1);
  flip(0, 0) = -1;
  const Isometry rho(txr, FactorwiseIsometry{{Isometry(tripod, TreeAutomorphism{{0, 2, 3, 1}}), Isometry::identity(line)}});
  const Isometry refl(txr, FactorwiseIsometry{{Isometry::identity(tripod), Isometry(line, EuclideanMotion{flip, vec({0})})}});
  const ProductAction act({rep_of(rho, "rho"), rep_of(refl, "s")});
  const SplittingResult r = build_splitting(act, {txr->make_point(vec({0, 0.6, 2}))});
  EXPECT_LE(r.pythagoras_residual, 1e-5);
  EXPECT_LE(r.holonomy_residual, 1e-5);
  EXPECT_LE(r.star_residual, 1e-5);
}

TEST(Splitting, NonCommutingFactorsAreRejected) {
  const SpacePtr e2 = make_euclidean(2);
  EXPECT_THROW(ProductAction({rep_of(euclidean_rotation(e2, 0.5, vec({0, 0})), "a"),
                              rep_of(euclidean_translation(e2, vec({1, 0})), "t")}),
               ConstructionError);
}

TEST(Splitting, UnboundedOrbitRaisesDiagnostic) {
  const SpacePtr e2 = make_euclidean(2);
  const ProductAction act({rep_of(euclidean_translation(e2, vec({1, 0})), "t"),
                           rep_of(euclidean_translation(e2, vec({0, 1})), "u")});
  EXPECT_THROW(build_splitting(act, {e2->base_point()}), EvanescenceDiagnostic);
}
