#include <gtest/gtest.h>

#include <cmath>

#include "hadamard/isometry.hpp"
#include "hadamard/model_spaces.hpp"
#include "hadamard/random.hpp"
#include "test_util.hpp"

using namespace hadamard;
using namespace hadamard::testing;

// Independent oracles: closed forms written without the library.
namespace {

double poincare_distance(double r1, double th1, double r2, double th2) {
  // hyperboloid point at polar (r, th) -> Poincare disk radius tanh(r/2)
  const double a = std::tanh(r1 / 2), b = std::tanh(r2 / 2);
  const double ux = a * std::cos(th1), uy = a * std::sin(th1);
  const double vx = b * std::cos(th2), vy = b * std::sin(th2);
  const double diff = (ux - vx) * (ux - vx) + (uy - vy) * (uy - vy);
  return std::acosh(1 + 2 * diff / ((1 - a * a) * (1 - b * b)));
}

double spd_diag_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::pow(std::log(a[i] / b[i]), 2);
  return std::sqrt(s);
}

}  // namespace

TEST(Euclidean, PythagoreanDistance) {
  const SpacePtr e2 = make_euclidean(2);
  EXPECT_DOUBLE_EQ(e2->distance(pt(*e2, {0, 0}), pt(*e2, {3, 4})), 5.0);
  const SpacePtr e3 = make_euclidean(3);
  EXPECT_NEAR(e3->distance(pt(*e3, {0, 0, 0}), pt(*e3, {1, 1, 1})), std::sqrt(3.0), 1e-15);
}

TEST(Euclidean, MidpointAndEndpoints) {
  const SpacePtr e2 = make_euclidean(2);
  const Point x = pt(*e2, {0, 0}), y = pt(*e2, {2, 0});
  expect_coords(e2->geodesic_point(x, y, 0.5), {1, 0}, 1e-15);
  expect_coords(e2->geodesic_point(x, y, 0.0), {0, 0}, 0.0);
}

TEST(Hyperbolic, DistanceFromMinkowskiProduct) {
  const SpacePtr h2 = make_hyperbolic(2);
  const Point o = h2->base_point();
  EXPECT_NEAR(h2->distance(o, hyp(*h2, 1.0, 0.3)), 1.0, 1e-12);
}

TEST(Hyperbolic, AgreesWithPoincareDiskFormula) {
  const SpacePtr h2 = make_hyperbolic(2);
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const double r1 = rng.uniform(0, 3), t1 = rng.uniform(0, 6.28), r2 = rng.uniform(0, 3), t2 = rng.uniform(0, 6.28);
    EXPECT_NEAR(h2->distance(hyp(*h2, r1, t1), hyp(*h2, r2, t2)), poincare_distance(r1, t1, r2, t2), 1e-9);
  }
}

TEST(Hyperbolic, GeodesicPointsSplitDistance) {
  const SpacePtr h2 = make_hyperbolic(2);
  const Point x = hyp(*h2, 1.2, 0.1), y = hyp(*h2, 2.0, 2.5);
  const double d = h2->distance(x, y);
  for (double t : {0.1, 0.37, 0.5, 0.9}) {
    const Point m = h2->geodesic_point(x, y, t);
    EXPECT_TRUE(h2->contains(m));
    EXPECT_NEAR(h2->distance(x, m), t * d, 1e-10);
    EXPECT_NEAR(h2->distance(m, y), (1 - t) * d, 1e-10);
  }
}

TEST(Hyperbolic, RejectsPointsOffTheHyperboloid) {
  const SpacePtr h2 = make_hyperbolic(2);
  EXPECT_THROW(h2->make_point(vec({1.0, 1.0, 0.0})), DomainError);
  EXPECT_THROW(h2->make_point(vec({-1.0, 0.0, 0.0})), DomainError);
}

TEST(Tree, LeafToLeafIsPathLength) {
  const SpacePtr t = make_tree(3, {{0, 1, 2.0}, {0, 2, 3.0}});
  EXPECT_NEAR(t->distance(tree_pt(*t, 0, 2.0), tree_pt(*t, 1, 3.0)), 5.0, 1e-15);
  const SpacePtr tripod = make_tree(4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}});
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) EXPECT_NEAR(tripod->distance(tree_pt(*tripod, a, 1), tree_pt(*tripod, b, 1)), 2.0, 1e-15);
  }
}

TEST(Tree, GeodesicPassesThroughBranchVertex) {
  const SpacePtr t = make_tree(4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}});
  const Point x = tree_pt(*t, 0, 0.75), y = tree_pt(*t, 1, 0.25);
  // 0.75 to the branch vertex out of a total of 1.0
  const Point m = t->geodesic_point(x, y, 0.75);
  EXPECT_NEAR(t->distance(m, tree_pt(*t, 0, 0.0)), 0.0, 1e-14);
}

TEST(Tree, RejectsBadConstruction) {
  EXPECT_THROW(make_tree(3, {{0, 1, 1.0}, {1, 2, -1.0}}), ConstructionError);
  EXPECT_THROW(make_tree(3, {{0, 1, 1.0}}), ConstructionError);
  EXPECT_THROW(make_tree(3, {{0, 1, 1.0}, {1, 0, 1.0}}), ConstructionError);
}

TEST(Spd, DiagonalDistanceIsLogEuclidean) {
  const SpacePtr spd = make_spd(2);
  EXPECT_NEAR(spd->distance(diag(*spd, {2, 3}), diag(*spd, {0.5, 7})), spd_diag_distance({2, 3}, {0.5, 7}), 1e-12);
}

TEST(Spd, InvariantUnderCongruence) {
  const SpacePtr spd = make_spd(2);
  Rng rng(3);
  Matrix g(2, 2);
  g << 1.5, 0.3, -0.7, 0.9;
  const Isometry c(spd, Congruence{g});
  for (int i = 0; i < 50; ++i) {
    const Point a = spd->random_point(rng, spd->base_point(), 1.5);
    const Point b = spd->random_point(rng, spd->base_point(), 1.5);
    EXPECT_NEAR(spd->distance(c.apply(a), c.apply(b)), spd->distance(a, b), 1e-9);
  }
}

TEST(Spd, CongruenceOfIdentity) {
  const SpacePtr spd = make_spd(2);
  Matrix g = Matrix::Zero(2, 2);
  g(0, 0) = 2;
  g(1, 1) = 1;
  expect_coords(Isometry(spd, Congruence{g}).apply(spd->base_point()), {4, 0, 0, 1}, 1e-14);
}

TEST(Spd, RejectsIndefiniteMatrix) {
  const SpacePtr spd = make_spd(2);
  EXPECT_THROW(spd->make_point(vec({1, 0, 0, -1})), DomainError);
}

TEST(Product, SquaredDistancesAdd) {
  const SpacePtr p = make_product({make_euclidean(1), make_euclidean(1)});
  Rng rng(9);
  for (int i = 0; i < 50; ++i) {
    const double a = rng.uniform(-5, 5), b = rng.uniform(-5, 5), c = rng.uniform(-5, 5), d = rng.uniform(-5, 5);
    EXPECT_NEAR(p->distance(pt(*p, {a, b}), pt(*p, {c, d})), std::hypot(a - c, b - d), 1e-12);
  }
}

TEST(Product, ComponentsAreFactorPoints) {
  const auto prod = std::make_shared<ProductSpace>(std::vector<SpacePtr>{make_euclidean(1), make_euclidean(1)});
  const Point x = pt(*prod, {3, 4});
  expect_coords(prod->component(0, x), {3}, 0.0);
  const SpacePtr tree = make_tree(4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}});
  const auto txr = std::make_shared<ProductSpace>(std::vector<SpacePtr>{tree, make_euclidean(1)});
  expect_coords(txr->component(1, txr->make_point(vec({1, 0.5, -2.5}))), {-2.5}, 0.0);
}

TEST(Spaces, PointsFromAnotherSpaceAreRejected) {
  const SpacePtr a = make_euclidean(2), b = make_euclidean(2);
  EXPECT_THROW(a->distance(a->base_point(), b->base_point()), DomainError);
}

TEST(Isometry, RotationQuarterTurn) {
  const SpacePtr e2 = make_euclidean(2);
  const Isometry r = euclidean_rotation(e2, M_PI / 2, vec({0, 0}));
  expect_coords(r.apply(pt(*e2, {1, 0})), {0, 1}, 1e-15);
  const Point x = pt(*e2, {0.3, -2});
  expect_coords(Isometry::identity(e2).apply(x), {0.3, -2}, 0.0);
}

TEST(Isometry, ComposeInversePower) {
  const SpacePtr h2 = make_hyperbolic(2);
  const Isometry b = hyperbolic_boost(h2, 1, 0.8);
  const Isometry r = hyperbolic_rotation(h2, 0.6);
  const Point x = hyp(*h2, 0.7, 1.1);
  EXPECT_NEAR(h2->distance(b.compose(b.inverse()).apply(x), x), 0.0, 1e-9);
  EXPECT_NEAR(h2->distance(b.power(3).apply(x), b.apply(b.apply(b.apply(x)))), 0.0, 1e-9);
  EXPECT_NEAR(h2->distance(b.compose(r).apply(x), b.apply(r.apply(x))), 0.0, 1e-12);
}

TEST(Isometry, TreeAutomorphismMustPreserveLengths) {
  const SpacePtr t = make_tree(4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 2}});
  EXPECT_NO_THROW(Isometry(t, TreeAutomorphism{{0, 2, 1, 3}}));
  EXPECT_THROW(Isometry(t, TreeAutomorphism{{0, 3, 2, 1}}), ConstructionError);
}

// Property: isometries preserve distances in every space kind.
TEST(Isometry, PreservesDistancesOnRandomPairs) {
  const SpacePtr h3 = make_hyperbolic(3);
  const Isometry g = hyperbolic_boost(h3, 2, 1.3).compose(hyperbolic_rotation(h3, 0.4, 1, 3));
  Rng rng(21);
  for (int i = 0; i < 100; ++i) {
    const Point a = h3->random_point(rng, h3->base_point(), 2.0), b = h3->random_point(rng, h3->base_point(), 2.0);
    EXPECT_NEAR(h3->distance(g.apply(a), g.apply(b)), h3->distance(a, b), 1e-8);
  }
}
