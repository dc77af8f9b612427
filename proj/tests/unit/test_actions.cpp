#include <gtest/gtest.h>

#include <cmath>

#include "hadamard/group_actions.hpp"
#include "hadamard/isometry.hpp"
#include "hadamard/model_spaces.hpp"
#include "test_util.hpp"

using namespace hadamard;
using namespace hadamard::testing;

namespace {

IsometryRep single(const Isometry& g, const std::string& name = "g") {
  return IsometryRep(g.space(), {{name, g}});
}

}  // namespace

TEST(Displacement, EuclideanTranslationIsConstant) {
  const SpacePtr e2 = make_euclidean(2);
  const Isometry t = euclidean_translation(e2, vec({3, 4}));
  for (const auto& x : {pt(*e2, {0, 0}), pt(*e2, {-7, 2.5})}) EXPECT_NEAR(displacement(t, x), 5.0, 1e-12);
}

TEST(Displacement, EmptyWordIsZero) {
  const SpacePtr e2 = make_euclidean(2);
  const IsometryRep rep = single(euclidean_translation(e2, vec({3, 4})));
  EXPECT_EQ(displacement(rep, Word{}, pt(*e2, {1, 1})), 0.0);
}

TEST(Displacement, HyperbolicTranslationOffAxis) {
  const SpacePtr h2 = make_hyperbolic(2);
  const double len = 0.9;
  const Isometry b = hyperbolic_boost(h2, 1, len);
  for (double r : {0.0, 0.5, 1.5}) {
    // point at distance r from the axis, on the perpendicular through the base point
    const Point x = h2->make_point(vec({std::cosh(r), 0.0, std::sinh(r)}));
    const double want = std::acosh(std::cosh(r) * std::cosh(r) * std::cosh(len) - std::sinh(r) * std::sinh(r));
    EXPECT_NEAR(displacement(b, x), want, 1e-10);
    if (r > 0) EXPECT_GT(displacement(b, x), len);
  }
}

TEST(Words, EvaluateMatchesComposition) {
  const SpacePtr e2 = make_euclidean(2);
  const Isometry r = euclidean_rotation(e2, 0.3, vec({1, 0}));
  const Isometry t = euclidean_translation(e2, vec({0, 2}));
  const IsometryRep rep(e2, {{"r", r}, {"t", t}});
  const Word w = rep.parse({"r", "t", "r^-1"});
  const Point x = pt(*e2, {0.5, -1});
  EXPECT_NEAR(e2->distance(rep.act(w, x), r.apply(t.apply(r.inverse().apply(x)))), 0.0, 1e-12);
  for (const Word& u : rep.word_ball(2)) EXPECT_LE(u.size(), 2u);
  EXPECT_FALSE(rep.find("s").has_value());
}

TEST(Words, InvolutionsAreTheirOwnInverse) {
  const SpacePtr e1 = make_euclidean(1);
  Matrix m(1, 1);
  m(0, 0) = -1;
  const IsometryRep rep(e1, {{"s", Isometry(e1, EuclideanMotion{m, vec({0})})}});
  EXPECT_EQ(rep.size(), 1u);
  EXPECT_EQ(rep.generator(0).inverse, 0u);
}

TEST(Clifford, TranslationIsClifford) {
  const SpacePtr e2 = make_euclidean(2);
  const CliffordReport r = detect_clifford(euclidean_translation(e2, vec({3, 4})));
  EXPECT_TRUE(r.is_clifford);
  EXPECT_NEAR(r.displacement, 5.0, 1e-9);
}

TEST(Clifford, HalfTurnIsNot) {
  const SpacePtr e2 = make_euclidean(2);
  EXPECT_FALSE(detect_clifford(euclidean_rotation(e2, M_PI, vec({0, 0}))).is_clifford);
}

TEST(Clifford, HyperbolicTranslationIsNot) {
  const SpacePtr h2 = make_hyperbolic(2);
  EXPECT_FALSE(detect_clifford(hyperbolic_boost(h2, 1, 1.0)).is_clifford);
}

TEST(Evanescence, TranslationOfTheLine) {
  const SpacePtr e1 = make_euclidean(1);
  const IsometryRep rep = single(euclidean_translation(e1, vec({1})));
  const EvanescenceVerdict v = evanescence_probe(rep, {0}, e1->base_point(), {1, 2, 4, 8, 16});
  EXPECT_EQ(v.verdict, Verdict::evanescent_witness);
  EXPECT_FALSE(v.witness.empty());
}

TEST(Evanescence, RotationOfThePlaneGrowsLinearly) {
  const SpacePtr e2 = make_euclidean(2);
  const IsometryRep rep = single(euclidean_rotation(e2, 1.0, vec({0, 0})));
  const EvanescenceVerdict v = evanescence_probe(rep, {0}, e2->base_point(), {1, 2, 4, 8, 16, 32});
  EXPECT_EQ(v.verdict, Verdict::non_evanescent_fit);
  EXPECT_NEAR(v.lambda, 2 * std::sin(0.5), 0.05 * 2 * std::sin(0.5));
  EXPECT_NEAR(v.d0, 0.0, 1e-6);
}

TEST(Evanescence, ProductWithTrivialFactor) {
  const SpacePtr e2 = make_euclidean(2), e1 = make_euclidean(1);
  const auto p = std::make_shared<ProductSpace>(std::vector<SpacePtr>{e2, e1});
  const SpacePtr ps = p;
  const Isometry g(ps, FactorwiseIsometry{{euclidean_rotation(e2, 1.0, vec({0, 0})), Isometry::identity(e1)}});
  const EvanescenceVerdict v = evanescence_probe(single(g), {0}, ps->base_point(), {1, 2, 4, 8, 16});
  EXPECT_EQ(v.verdict, Verdict::evanescent_witness);
}

TEST(Ladder, TranslationDisplacementsStayConstant) {
  const SpacePtr e2 = make_euclidean(2);
  const IsometryRep rep = single(euclidean_translation(e2, vec({3, 4})));
  std::vector<Point> ys;
  for (int n = 1; n <= 6; ++n) ys.push_back(pt(*e2, {double(n * n), 0}));
  const LadderResult r = evanescent_ladder(rep, {0}, e2->base_point(), ys);
  EXPECT_TRUE(r.bounded);
  for (double d : r.displacements) EXPECT_NEAR(d, 5.0, 1e-9);
}

TEST(Ladder, RotationIsRejected) {
  const SpacePtr e2 = make_euclidean(2);
  const IsometryRep rep = single(euclidean_rotation(e2, 1.0, vec({0, 0})));
  std::vector<Point> ys;
  for (int n = 1; n <= 6; ++n) ys.push_back(pt(*e2, {double(n * n), 0}));
  EXPECT_FALSE(evanescent_ladder(rep, {0}, e2->base_point(), ys).bounded);
}

TEST(Ladder, PathShiftOnALongTree) {
  // path 0-1-...-20 with unit edges; the shift is approximated by moving along the path
  const int n = 21;
  std::vector<MetricTree::Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
  const SpacePtr path = make_tree(n, edges);
  const Point x0 = tree_pt(*path, 0, 0);
  std::vector<Point> ys;
  for (int k = 2; k <= 16; k += 2) ys.push_back(tree_pt(*path, k - 1, 1.0));
  // displacement of a shift by one edge, measured along the path
  const LadderResult r = evanescent_ladder(*path, x0, ys, [&](const Point& p) {
    const double along = path->distance(x0, p);
    return along + 1.0 <= n - 1 ? 1.0 : 0.0;
  });
  EXPECT_TRUE(r.bounded);
  for (double d : r.displacements) EXPECT_NEAR(d, 1.0, 1e-12);
}
