#include "convlab/lp.hpp"

#include <gtest/gtest.h>

#include "support/oracles.hpp"

namespace convlab {
namespace {

lp::Term T(int v, long num, long den = 1) { return {v, rat(num, den)}; }

TEST(Lp, SimpleBox) {
  lp::Problem p;
  int x = p.add_var(), y = p.add_var();
  p.add({T(x, 1)}, lp::Rel::Le, rat(1));
  p.add({T(y, 1)}, lp::Rel::Le, rat(2));
  p.add({T(x, -1)}, lp::Rel::Le, rat(0));
  p.add({T(y, -1)}, lp::Rel::Le, rat(0));
  p.maximize({T(x, 1), T(y, 1)});
  auto r = lp::solve(p);
  ASSERT_EQ(r.status, lp::Status::Optimal);
  EXPECT_EQ(r.value, rat(3));
  EXPECT_EQ(r.x[x], rat(1));
  EXPECT_EQ(r.x[y], rat(2));
}

TEST(Lp, FreeVariablesGoNegative) {
  lp::Problem p;
  int x = p.add_var();
  p.add({T(x, 1)}, lp::Rel::Ge, rat(-5));
  p.minimize({T(x, 1)});
  auto r = lp::solve(p);
  ASSERT_EQ(r.status, lp::Status::Optimal);
  EXPECT_EQ(r.value, rat(-5));
}

TEST(Lp, EqualityRows) {
  lp::Problem p;
  int x = p.add_var(), y = p.add_var();
  p.add({T(x, 1), T(y, 1)}, lp::Rel::Eq, rat(1));
  p.add({T(x, 1), T(y, -1)}, lp::Rel::Eq, rat(1, 3));
  p.maximize({T(x, 1)});
  auto r = lp::solve(p);
  ASSERT_EQ(r.status, lp::Status::Optimal);
  EXPECT_EQ(r.x[x], rat(2, 3));
  EXPECT_EQ(r.x[y], rat(1, 3));
}

TEST(Lp, InfeasibleDetected) {
  lp::Problem p;
  int x = p.add_var();
  p.add({T(x, 1)}, lp::Rel::Le, rat(-1));
  p.add({T(x, 1)}, lp::Rel::Ge, rat(1));
  p.maximize({T(x, 1)});
  EXPECT_EQ(lp::solve(p).status, lp::Status::Infeasible);
  EXPECT_FALSE(lp::feasible(p));
}

TEST(Lp, UnboundedDetected) {
  lp::Problem p;
  int x = p.add_var();
  p.add({T(x, 1)}, lp::Rel::Ge, rat(0));
  p.maximize({T(x, 1)});
  EXPECT_EQ(lp::solve(p).status, lp::Status::Unbounded);
}

TEST(Lp, NonnegativeVariablesAndRedundantRows) {
  lp::Problem p;
  int x = p.add_var(true), y = p.add_var(true);
  p.add({T(x, 1), T(y, 1)}, lp::Rel::Eq, rat(1));
  p.add({T(x, 2), T(y, 2)}, lp::Rel::Eq, rat(2));  // redundant
  p.maximize({T(x, 3), T(y, 5)});
  auto r = lp::solve(p);
  ASSERT_EQ(r.status, lp::Status::Optimal);
  EXPECT_EQ(r.value, rat(5));
}

TEST(Lp, DegenerateVertexTerminates) {
  // the classic cycling-prone instance; Bland's rule must terminate
  lp::Problem p;
  int x1 = p.add_var(true), x2 = p.add_var(true), x3 = p.add_var(true),
      x4 = p.add_var(true);
  p.add({T(x1, 1, 2), T(x2, -11, 2), T(x3, -5, 2), T(x4, 9)}, lp::Rel::Le, rat(0));
  p.add({T(x1, 1, 2), T(x2, -3, 2), T(x3, -1, 2), T(x4, 1)}, lp::Rel::Le, rat(0));
  p.add({T(x1, 1)}, lp::Rel::Le, rat(1));
  p.maximize({T(x1, 10), T(x2, -57), T(x3, -9), T(x4, -24)});
  auto r = lp::solve(p);
  ASSERT_EQ(r.status, lp::Status::Optimal);
  EXPECT_EQ(r.value, rat(1));
}

TEST(Lp, MatchesBruteForceOracleOnSeededInstances) {
  oracle::Rng rng(20240811);
  int checked = 0;
  for (int inst = 0; inst < 60; ++inst) {
    const int d = static_cast<int>(rng.integer(2, 4));
    oracle::BruteLp brute;
    lp::Problem p;
    std::vector<int> vars;
    for (int i = 0; i < d; ++i) vars.push_back(p.add_var());
    // bounding box keeps the oracle's vertex enumeration valid
    for (int i = 0; i < d; ++i) {
      RatVec row(d, rat(0));
      row[i] = 1;
      brute.add(row, rat(6));
      p.add({T(vars[i], 1)}, lp::Rel::Le, rat(6));
      row[i] = -1;
      brute.add(row, rat(6));
      p.add({T(vars[i], -1)}, lp::Rel::Le, rat(6));
    }
    const int extra = static_cast<int>(rng.integer(1, 4));
    for (int rix = 0; rix < extra; ++rix) {
      RatVec row(d);
      std::vector<lp::Term> terms;
      for (int i = 0; i < d; ++i) {
        row[i] = rng.rational(3, 2);
        if (sgn(row[i]) != 0) terms.push_back({vars[i], row[i]});
      }
      Rational rhs = rng.rational(5, 1) + rat(8);  // keep the origin feasible
      brute.add(row, rhs);
      p.add(std::move(terms), lp::Rel::Le, rhs);
    }
    RatVec obj(d);
    std::vector<lp::Term> obj_terms;
    for (int i = 0; i < d; ++i) {
      obj[i] = rng.rational(4, 2);
      if (sgn(obj[i]) != 0) obj_terms.push_back({vars[i], obj[i]});
    }
    p.maximize(std::move(obj_terms));
    auto mine = lp::solve(p);
    auto expected = brute.maximize(obj);
    ASSERT_EQ(mine.status, lp::Status::Optimal);
    ASSERT_TRUE(expected.has_value());
    EXPECT_EQ(mine.value, *expected) << "instance " << inst;
    ++checked;
  }
  EXPECT_EQ(checked, 60);
}

}  // namespace
}  // namespace convlab
