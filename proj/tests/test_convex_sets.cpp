#include "convlab/sets.hpp"

#include <gtest/gtest.h>

#include "support/oracles.hpp"

namespace convlab {
namespace {

const NormSpec kSup = NormSpec::sup_c0();
const NormSpec kL1 = NormSpec::ell1();
const NormSpec kL2 = NormSpec::ell2();
const NormSpec kBv = NormSpec::bv_c0();

Vector z0() { return Vector{{1, rat(1, 2)}}; }
Functional fhat(uint32_t n) { return Functional{{1, rat(1)}, {n, rat(1)}}; }

ConvexSet prop21_level_set(uint32_t n) {
  // {x : x0 = x1} ∩ {x : x1 + x_n = 1}
  return ConvexSet::subspace_slice({{Functional{{0, rat(1)}, {1, rat(-1)}}, rat(0)}},
                                   ConvexSet::hyperplane(fhat(n), rat(1)));
}

ConvexSet prop21_limit_set() {
  return ConvexSet::subspace_slice({{Functional{{0, rat(1)}, {1, rat(-1)}}, rat(0)}},
                                   ConvexSet::hyperplane(Functional{{1, rat(1)}}, rat(1)));
}

TEST(Distance, WorkedHyperplaneSliceValues) {
  for (uint32_t n : {2u, 3u, 64u, 128u}) {
    EXPECT_EQ(distance(z0(), prop21_level_set(n), kBv), Scalar::exact(rat(1, 2)));
  }
  EXPECT_EQ(distance(z0(), prop21_limit_set(), kBv), Scalar::exact(rat(1)));
}

TEST(Distance, MembershipAndEmpty) {
  ConvexSet tri = ConvexSet::polytope(
      {Vector(), Vector::unit(0), Vector{{0, rat(1, 2)}, {1, rat(1, 2)}}});
  EXPECT_EQ(distance(Vector{{0, rat(1, 2)}}, tri, kSup), Scalar::exact(rat(0)));
  EXPECT_TRUE(contains(tri, Vector{{0, rat(1, 2)}}));
  EXPECT_EQ(distance(Vector{{0, rat(1, 2)}}, ConvexSet::empty(), kSup),
            Scalar::pos_inf());
  EXPECT_TRUE(is_empty_set(ConvexSet::empty()));
  EXPECT_FALSE(is_empty_set(tri));
}

TEST(Distance, HyperplaneIdentityExact) {
  // d(x, {f = a}) * ||f||_* = |<f, x> - a| across polyhedral families
  oracle::Rng rng(1001);
  std::vector<uint32_t> window{0, 1, 2, 3, 4};
  int nontrivial = 0;
  for (int i = 0; i < 30; ++i) {
    Functional f = rng.functional(window, 4, 3);
    if (f.zero()) continue;
    Vector x = rng.vector(window, 5, 3);
    Rational a = rng.rational(4, 2);
    ConvexSet hp = ConvexSet::hyperplane(f, a);
    for (const auto& n : {kSup, kL1, kBv}) {
      Scalar d = distance(x, hp, n);
      Scalar dual = dual_norm_eval(n, f);
      EXPECT_EQ((d * dual).rational(), abs(pairing(f, x) - a));
    }
    ++nontrivial;
  }
  EXPECT_GT(nontrivial, 20);
}

TEST(Distance, LipschitzSampled) {
  oracle::Rng rng(1002);
  ConvexSet box = ConvexSet::ball(Vector(), rat(1), kSup);
  ConvexSet tri = ConvexSet::polytope({Vector::unit(0), Vector::unit(1),
                                       Vector{{0, rat(2)}, {1, rat(2)}}});
  for (int i = 0; i < 20; ++i) {
    Vector x = rng.vector({0, 1}, 4, 2);
    Vector y = rng.vector({0, 1}, 4, 2);
    for (const auto& c : {box, tri}) {
      Scalar dx = distance(x, c, kSup);
      Scalar dy = distance(y, c, kSup);
      Scalar step = norm_eval(kSup, x.minus(y));
      EXPECT_LE(Scalar::compare((dx - dy).abs(), step), 0);
    }
  }
}

TEST(Gap, EmptyAndTouchingAndBallToHyperplane) {
  ConvexSet a = ConvexSet::polytope({Vector(), Vector::unit(0)});
  ConvexSet b = ConvexSet::polytope({Vector::unit(0), Vector::unit(1)});
  EXPECT_EQ(gap(a, ConvexSet::empty(), kSup), Scalar::pos_inf());
  EXPECT_EQ(gap(a, b, kSup), Scalar::exact(rat(0)));
  ConvexSet ball = ConvexSet::ball(Vector(), rat(1), kSup);
  ConvexSet hp = ConvexSet::hyperplane(Functional{{1, rat(1)}}, rat(2));
  EXPECT_EQ(gap(ball, hp, kSup), Scalar::exact(rat(1)));
}

TEST(Gap, DominatedByPointDistances) {
  oracle::Rng rng(1003);
  ConvexSet a = ConvexSet::polytope({Vector{{0, rat(2)}}, Vector{{0, rat(3)}, {1, rat(1)}}});
  ConvexSet b = ConvexSet::ball(Vector{{0, rat(-2)}}, rat(1), kSup);
  Scalar g = gap(a, b, kSup);
  const auto* poly = a.as<ConvexSet::Polytope>();
  for (int i = 0; i < 10; ++i) {
    // random convex combination of A's vertices
    Rational t = abs(rng.rational(7, 7));
    if (cmp(t, rat(1)) > 0) t = rat(1) / t;
    Vector pt = poly->vertices[0].scaled(t).plus(poly->vertices[1].scaled(rat(1) - t));
    EXPECT_LE(Scalar::compare(g, distance(pt, b, kSup)), 0);
  }
}

TEST(Support, BallPolytopeAndBvC0Ball) {
  ConvexSet ball = ConvexSet::ball(Vector(), rat(3, 2), kSup);
  Functional f{{0, rat(1)}, {1, rat(-2)}};
  EXPECT_EQ(support_value(f, ball),
            Scalar::exact(rat(3, 2)) * dual_norm_eval(kSup, f));
  ConvexSet tri = ConvexSet::polytope({Vector(), Vector::unit(0),
                                       Vector{{0, rat(1)}, {1, rat(4)}}});
  EXPECT_EQ(support_value(f, tri), Scalar::exact(rat(1)));  // max over vertices
  ConvexSet bv_ball = ConvexSet::ball(Vector(), rat(1), kBv);
  EXPECT_EQ(support_value(Functional{{1, rat(1)}}, bv_ball), Scalar::exact(rat(1)));
  // unbounded above / empty conventions
  EXPECT_EQ(support_value(f, ConvexSet::halfspace(Functional{{1, rat(1)}}, rat(0))),
            Scalar::pos_inf());
  EXPECT_EQ(support_value(f, ConvexSet::empty()), Scalar::neg_inf());
}

TEST(Separate, OneDimensionalAndOverlapError) {
  ConvexSet origin = ConvexSet::singleton(Vector());
  ConvexSet right = ConvexSet::halfspace(Functional{{0, rat(1)}}, rat(1), false);
  Separation s = separate(origin, right, kSup);
  EXPECT_EQ(s.margin, rat(1));
  EXPECT_EQ(s.lambda, (Functional{{0, rat(1)}}));
  EXPECT_EQ(s.sup_a, rat(0));
  EXPECT_EQ(s.inf_b, rat(1));
  ConvexSet a = ConvexSet::polytope({Vector(), Vector::unit(0)});
  ConvexSet b = ConvexSet::polytope({Vector::unit(0), Vector::unit(1)});
  EXPECT_THROW(separate(a, b, kSup), SeparationError);
}

TEST(Separate, MarginEqualsGapOnSeededDisjointPairs) {
  oracle::Rng rng(1004);
  int done = 0;
  while (done < 25) {
    std::vector<uint32_t> window{0, 1, 2};
    std::vector<Vector> va, vb;
    for (int i = 0; i < 3; ++i) va.push_back(rng.vector(window, 3, 2));
    Vector shift{{0, rat(8)}};
    for (int i = 0; i < 3; ++i) vb.push_back(rng.vector(window, 3, 2).plus(shift));
    ConvexSet a = ConvexSet::polytope(va), b = ConvexSet::polytope(vb);
    for (const auto& norm : {kSup, kL1}) {
      Scalar g = gap(a, b, norm);
      if (!g.is_rational() || sgn(g.rational()) <= 0) continue;
      Separation s = separate(a, b, norm);
      EXPECT_EQ(s.margin, g.rational());
      EXPECT_EQ(dual_norm_eval(norm, s.lambda), Scalar::exact(rat(1)));
      ++done;
    }
  }
}

TEST(Subgradient, InsideZeroHyperplaneGradientAndSampledInequality) {
  ConvexSet tri = ConvexSet::polytope({Vector(), Vector::unit(0), Vector::unit(1)});
  EXPECT_TRUE(distance_subgradient(Vector{{0, rat(1, 4)}, {1, rat(1, 4)}}, tri, kSup)
                  .zero());
  // euclidean hyperplane: gradient is f / ||f||_2
  Functional f{{0, rat(3)}, {1, rat(4)}};
  ConvexSet hp = ConvexSet::hyperplane(f, rat(-1));
  Functional lam = distance_subgradient(Vector{{0, rat(2)}, {1, rat(2)}}, hp, kL2);
  EXPECT_NEAR(lam.at(0).get_d(), 3.0 / 5.0, 1e-9);
  EXPECT_NEAR(lam.at(1).get_d(), 4.0 / 5.0, 1e-9);
  // polyhedral ambient: subgradient inequality at sampled probes
  oracle::Rng rng(1005);
  Vector x{{0, rat(3)}, {1, rat(3)}};
  Functional sub = distance_subgradient(x, tri, kSup);
  EXPECT_EQ(dual_norm_eval(kSup, sub), Scalar::exact(rat(1)));
  Scalar dx = distance(x, tri, kSup);
  for (int i = 0; i < 20; ++i) {
    Vector y = rng.vector({0, 1}, 6, 2);
    Scalar dy = distance(y, tri, kSup);
    Scalar lhs = Scalar::exact(pairing(sub, y.minus(x)));
    EXPECT_LE(Scalar::compare(lhs, dy - dx), 0);
  }
}

TEST(Euclidean, DistanceBranches) {
  // polytope via min-norm point
  ConvexSet seg = ConvexSet::polytope({Vector{{0, rat(1)}, {1, rat(1)}},
                                       Vector{{0, rat(1)}, {1, rat(-1)}}});
  EXPECT_EQ(distance(Vector(), seg, kL2), Scalar::exact(rat(1)));
  // hyperplane / halfspace closed forms
  Functional f{{0, rat(3)}, {1, rat(4)}};
  EXPECT_EQ(distance(Vector(), ConvexSet::hyperplane(f, rat(5)), kL2),
            Scalar::exact(rat(1)));
  EXPECT_EQ(distance(Vector(), ConvexSet::halfspace(f, rat(5), false), kL2),
            Scalar::exact(rat(1)));
  EXPECT_EQ(distance(Vector(), ConvexSet::halfspace(f, rat(5), true), kL2),
            Scalar::exact(rat(0)));
  // euclidean ball
  ConvexSet b2 = ConvexSet::ball(Vector{{0, rat(5)}}, rat(2), kL2);
  EXPECT_EQ(distance(Vector(), b2, kL2), Scalar::exact(rat(3)));
  // polyhedral region (slice of halfspaces) via exact projection
  ConvexSet wedge = ConvexSet::intersection(
      {ConvexSet::halfspace(Functional{{0, rat(1)}}, rat(-1)),
       ConvexSet::halfspace(Functional{{1, rat(1)}}, rat(-1))});
  EXPECT_EQ(distance(Vector(), wedge, kL2).square(), rat(2));
}

TEST(Euclidean, IndicatorEpigraphSeparates) {
  PolyFunc ind = PolyFunc::indicator({Vector(), Vector::unit(0)});
  ConvexSet epi = epigraph_build(ind, kL2);
  const auto* e = epi.as<ConvexSet::Epigraph>();
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->scalar_index, 1u);
  // point above the domain: distance 0 at r >= 0
  EXPECT_EQ(distance(Vector{{0, rat(1, 2)}, {1, rat(3)}}, epi, kL2),
            Scalar::exact(rat(0)));
  // point below: vertical distance only
  EXPECT_EQ(distance(Vector{{0, rat(1, 2)}, {1, rat(-2)}}, epi, kL2),
            Scalar::exact(rat(2)));
  // point beside and below: pythagorean combination
  EXPECT_EQ(distance(Vector{{0, rat(4)}, {1, rat(-4)}}, epi, kL2).square(), rat(25));
}

TEST(Euclidean, GapPolytopesAndEpigraphTruncation) {
  ConvexSet a = ConvexSet::polytope({Vector{{0, rat(3)}}, Vector{{0, rat(3)}, {1, rat(1)}}});
  ConvexSet b = ConvexSet::polytope({Vector(), Vector::unit(1)});
  EXPECT_EQ(gap(a, b, kL2), Scalar::exact(rat(3)));
  PolyFunc ind = PolyFunc::indicator({Vector(), Vector::unit(0)});
  ConvexSet epi = epigraph_build(ind, kL2);  // scalar slot 1
  ConvexSet w = ConvexSet::polytope({Vector{{0, rat(1, 2)}, {1, rat(4)}}});
  EXPECT_EQ(gap(w, epi, kL2), Scalar::exact(rat(0)));
  ConvexSet w2 = ConvexSet::polytope({Vector{{0, rat(3)}, {1, rat(4)}}});
  EXPECT_EQ(gap(w2, epi, kL2), Scalar::exact(rat(2)));  // sideways to x0 = 1, r = 4
}

TEST(Epigraph, BuildAndGridOracle) {
  // f = max(<e0*, .>, 0) on an unbounded domain: epigraph is an H-region
  PolyFunc f{{{Functional{{0, rat(1)}}, rat(0)}, {Functional(), rat(0)}}, std::nullopt};
  ConvexSet epi = epigraph_build(f, kL2);
  const auto* node = epi.as<ConvexSet::Epigraph>();
  ASSERT_NE(node, nullptr);
  for (long a = -3; a <= 3; ++a) {
    for (long r = -3; r <= 3; ++r) {
      Vector pt{{0, rat(a)}, {node->scalar_index, rat(r)}};
      bool expected = rat(r) >= std::max(rat(a), rat(0));
      EXPECT_EQ(contains(epi, pt), expected) << a << "," << r;
    }
  }
  // f == 0 everywhere: upper halfspace
  PolyFunc zero{{}, std::nullopt};
  ConvexSet upper = epigraph_build(zero, kL2);
  const auto* un = upper.as<ConvexSet::Epigraph>();
  EXPECT_TRUE(contains(upper, Vector{{un->scalar_index, rat(2)}}));
  EXPECT_FALSE(contains(upper, Vector{{un->scalar_index, rat(-1, 2)}}));
  // indicator epigraph is P x [0, inf)
  PolyFunc ind = PolyFunc::indicator({Vector(), Vector::unit(0)});
  ConvexSet pepi = epigraph_build(ind, kL2);
  const auto* pn = pepi.as<ConvexSet::Epigraph>();
  EXPECT_TRUE(contains(pepi, Vector{{0, rat(1, 3)}, {pn->scalar_index, rat(7)}}));
  EXPECT_FALSE(contains(pepi, Vector{{0, rat(2)}, {pn->scalar_index, rat(7)}}));
  EXPECT_FALSE(contains(pepi, Vector{{0, rat(1, 3)}, {pn->scalar_index, rat(-1)}}));
}

TEST(Coercivity, IndicatorMaxAffineAndZero) {
  // indicator of the unit sup ball: spheres beyond the domain are empty
  PolyFunc ind = PolyFunc::indicator(
      {Vector{{0, rat(1)}, {1, rat(1)}}, Vector{{0, rat(1)}, {1, rat(-1)}},
       Vector{{0, rat(-1)}, {1, rat(1)}}, Vector{{0, rat(-1)}, {1, rat(-1)}}});
  auto margins = coercivity_margin(ind, {rat(2), rat(3)}, kSup);
  ASSERT_EQ(margins.size(), 2u);
  EXPECT_EQ(margins[0], Scalar::pos_inf());
  EXPECT_EQ(margins[1], Scalar::pos_inf());
  // max-affine with slopes bounded by 2: margins never exceed 2, never diverge
  PolyFunc maxaff{{{Functional{{0, rat(2)}}, rat(0)}, {Functional{{0, rat(-1)}}, rat(1)}},
                  std::nullopt};
  auto m2 = coercivity_margin(maxaff, {rat(1), rat(2), rat(4), rat(8)}, kSup);
  for (const auto& m : m2) {
    ASSERT_TRUE(m.is_rational());
    EXPECT_LE(cmp(m.rational(), rat(2)), 0);
  }
  // f == 0: all margins zero
  PolyFunc zero{{}, std::nullopt};
  for (const auto& m : coercivity_margin(zero, {rat(1), rat(5)}, kSup))
    EXPECT_EQ(m, Scalar::exact(rat(0)));
}

TEST(Minkowski, ConsistencyBetweenJointProgramAndComposedDistance) {
  oracle::Rng rng(1006);
  ConvexSet base = ConvexSet::polytope({Vector(), Vector::unit(0),
                                        Vector{{0, rat(1)}, {1, rat(2)}}});
  for (const auto& norm : {kSup, kL1}) {
    ConvexSet fat = ConvexSet::minkowski_sum(
        base, ConvexSet::NormBall{Vector(), rat(1, 2), norm});
    for (int i = 0; i < 15; ++i) {
      Vector x = rng.vector({0, 1}, 5, 2);
      Scalar direct = distance(x, fat, norm);
      Scalar composed = scalar_max(Scalar::exact(rat(0)),
                                   distance(x, base, norm) - Scalar::exact(rat(1, 2)));
      EXPECT_EQ(direct, composed);
    }
  }
}

TEST(NearestPoint, CanonicalAndMembership) {
  ConvexSet seg = ConvexSet::polytope({Vector{{0, rat(1)}, {1, rat(-1)}},
                                       Vector{{0, rat(1)}, {1, rat(1)}}});
  // all segment points are sup-nearest to the origin; the canonical pick is
  // the lexicographically smallest one
  Vector p = nearest_point(Vector(), seg, kSup);
  EXPECT_EQ(p, (Vector{{0, rat(1)}, {1, rat(-1)}}));
  EXPECT_TRUE(contains(seg, p));
  EXPECT_EQ(norm_eval(kSup, p), distance(Vector(), seg, kSup));
  // euclidean: unique projection
  Vector q = nearest_point(Vector(), seg, kL2);
  EXPECT_EQ(q, (Vector{{0, rat(1)}}));
}

TEST(Sets, ScaledAndTranslated) {
  ConvexSet tri = ConvexSet::polytope({Vector(), Vector::unit(0), Vector::unit(1)});
  ConvexSet big = scaled(tri, rat(3, 2));
  EXPECT_TRUE(contains(big, Vector{{0, rat(3, 2)}}));
  EXPECT_FALSE(contains(tri, Vector{{0, rat(3, 2)}}));
  ConvexSet moved = translated(tri, Vector{{1, rat(5)}});
  EXPECT_TRUE(contains(moved, Vector{{1, rat(5)}}));
  EXPECT_THROW(scaled(tri, rat(0)), SetError);
  ConvexSet hp = ConvexSet::hyperplane(Functional{{0, rat(1)}}, rat(1));
  EXPECT_TRUE(contains(scaled(hp, rat(2)), Vector{{0, rat(2)}}));
}

TEST(Generators, ShapesAndCylinders) {
  Generators g = generators(ConvexSet::hyperplane(Functional{{0, rat(1)}}, rat(2)), {0, 1});
  ASSERT_EQ(g.points.size(), 1u);
  EXPECT_EQ(pairing(Functional{{0, rat(1)}}, g.points[0]), rat(2));
  EXPECT_EQ(g.rays.size(), 2u);  // the cylinder direction +-e1
  Generators hs =
      generators(ConvexSet::halfspace(Functional{{0, rat(1)}}, rat(0)), {0});
  EXPECT_EQ(hs.rays.size(), 1u);
  EXPECT_EQ(hs.rays[0], Vector::unit(0).negated());
  Generators ball = generators(ConvexSet::ball(Vector(), rat(2), kL1), {0, 1});
  EXPECT_EQ(ball.points.size(), 4u);
  for (const auto& p : ball.points) EXPECT_EQ(norm_eval(kL1, p), Scalar::exact(rat(2)));
}

}  // namespace
}  // namespace convlab
