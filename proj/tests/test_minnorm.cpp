#include "convlab/minnorm.hpp"

#include <gtest/gtest.h>

#include "support/oracles.hpp"

namespace convlab {
namespace {

// exhaustive oracle: min ||x||^2 over conv(pts) via all affine subsets
Rational brute_min_norm_sq(const RatMat& pts) {
  const std::size_t n = pts.size();
  Rational best;
  bool have = false;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i)
      if ((mask >> i) & 1) s.push_back(i);
    const std::size_t k = s.size();
    RatMat sys(k + 1, RatVec(k + 1, rat(0)));
    RatVec rhs(k + 1, rat(0));
    rhs[0] = 1;
    for (std::size_t j = 0; j < k; ++j) sys[0][j + 1] = 1;
    for (std::size_t i = 0; i < k; ++i) {
      sys[i + 1][0] = 1;
      for (std::size_t j = 0; j < k; ++j)
        sys[i + 1][j + 1] = linalg::dot(pts[s[i]], pts[s[j]]);
    }
    auto sol = linalg::solve(sys, rhs);
    if (!sol) continue;
    bool nonneg = true;
    for (std::size_t j = 0; j < k; ++j)
      if (sgn((*sol)[j + 1]) < 0) nonneg = false;
    if (!nonneg) continue;
    RatVec x(pts[0].size(), rat(0));
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t c = 0; c < x.size(); ++c) x[c] += (*sol)[j + 1] * pts[s[j]][c];
    Rational sq = linalg::dot(x, x);
    if (!have || cmp(sq, best) < 0) {
      best = sq;
      have = true;
    }
  }
  return best;
}

TEST(MinNorm, KnownTriangles) {
  // segment from (1,1) to (1,-1): nearest point to origin is (1,0)
  RatMat pts{{rat(1), rat(1)}, {rat(1), rat(-1)}};
  auto r = minnorm::min_norm_point(pts);
  EXPECT_EQ(r.sq_dist, rat(1));
  EXPECT_EQ(r.point, (RatVec{rat(1), rat(0)}));
  // hull containing the origin
  RatMat hull{{rat(1), rat(0)}, {rat(-1), rat(1)}, {rat(-1), rat(-1)}};
  EXPECT_EQ(minnorm::min_norm_point(hull).sq_dist, rat(0));
}

TEST(MinNorm, MatchesExhaustiveOracle) {
  oracle::Rng rng(90210);
  for (int inst = 0; inst < 120; ++inst) {
    const int d = static_cast<int>(rng.integer(1, 4));
    const int n = static_cast<int>(rng.integer(1, 7));
    RatMat pts;
    for (int i = 0; i < n; ++i) {
      RatVec p(d);
      for (int j = 0; j < d; ++j) p[j] = rng.rational(4, 3);
      pts.push_back(std::move(p));
    }
    auto mine = minnorm::min_norm_point(pts);
    EXPECT_EQ(mine.sq_dist, brute_min_norm_sq(pts)) << "instance " << inst;
  }
}

TEST(MinNorm, HullDistanceShifts) {
  RatMat pts{{rat(2), rat(0)}, {rat(3), rat(1)}};
  auto r = minnorm::sq_distance_to_hull({rat(0), rat(0)}, pts);
  EXPECT_EQ(r.sq_dist, rat(4));
  EXPECT_EQ(r.point, (RatVec{rat(2), rat(0)}));
}

TEST(Projection, HalfspaceAndBox) {
  // project (2, 2) onto {x <= 1, y <= 1}
  linalg::HRep h;
  h.a = {{rat(1), rat(0)}, {rat(0), rat(1)}};
  h.b = {rat(1), rat(1)};
  auto r = minnorm::project_onto_region({rat(2), rat(2)}, h);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->sq_dist, rat(2));
  EXPECT_EQ(r->point, (RatVec{rat(1), rat(1)}));
}

TEST(Projection, EqualityRows) {
  linalg::HRep h;
  h.eq = {{rat(1), rat(1)}};
  h.c = {rat(2)};
  auto r = minnorm::project_onto_region({rat(0), rat(0)}, h);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->sq_dist, rat(2));
  EXPECT_EQ(r->point, (RatVec{rat(1), rat(1)}));
}

TEST(Projection, InfeasibleRegion) {
  linalg::HRep h;
  h.a = {{rat(1)}, {rat(-1)}};
  h.b = {rat(-1), rat(-1)};  // x <= -1 and -x <= -1
  EXPECT_FALSE(minnorm::project_onto_region({rat(0)}, h).has_value());
}

TEST(Projection, MatchesWolfeOnPolytopes) {
  // project onto the sup-ball square via rows, compare against Wolfe on the
  // vertex description
  oracle::Rng rng(31137);
  linalg::HRep square;
  square.a = {{rat(1), rat(0)}, {rat(-1), rat(0)}, {rat(0), rat(1)}, {rat(0), rat(-1)}};
  square.b = {rat(1), rat(1), rat(1), rat(1)};
  RatMat verts{{rat(1), rat(1)}, {rat(1), rat(-1)}, {rat(-1), rat(1)}, {rat(-1), rat(-1)}};
  for (int i = 0; i < 40; ++i) {
    RatVec x{rng.rational(4, 2), rng.rational(4, 2)};
    auto a = minnorm::project_onto_region(x, square);
    auto b = minnorm::sq_distance_to_hull(x, verts);
    ASSERT_TRUE(a.has_value());
    EXPECT_EQ(a->sq_dist, b.sq_dist);
  }
}

}  // namespace
}  // namespace convlab
