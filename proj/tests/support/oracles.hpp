#pragma once

// Test-only oracles, deliberately independent of the library's simplex and
// enumeration code paths: a brute-force LP solver working off its own
// Gaussian elimination, plus a deterministic seeded generator for instances.

#include <cstdint>
#include <optional>
#include <vector>

#include "convlab/coords.hpp"
#include "convlab/rational.hpp"

namespace oracle {

using convlab::Rational;
using convlab::RatMat;
using convlab::RatVec;

// solves A x = b by plain Gaussian elimination; nullopt unless unique
inline std::optional<RatVec> gauss_unique(RatMat a, RatVec b) {
  const std::size_t n = a.size();
  if (n == 0 || a[0].size() != n) return std::nullopt;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && sgn(a[piv][col]) == 0) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || sgn(a[r][col]) == 0) continue;
      Rational f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  RatVec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

struct BruteLp {
  RatMat rows;  // rows[i] . x <= rhs[i]
  RatVec rhs;

  void add(RatVec row, Rational bound) {
    rows.push_back(std::move(row));
    rhs.push_back(std::move(bound));
  }

  bool feasible(const RatVec& x) const {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      Rational v(0);
      for (std::size_t j = 0; j < x.size(); ++j) v += rows[i][j] * x[j];
      if (cmp(v, rhs[i]) > 0) return false;
    }
    return true;
  }

  // enumerates all basic points (d tight rows) and maximizes the objective;
  // valid for bounded feasible programs
  std::optional<Rational> maximize(const RatVec& obj) const {
    const std::size_t d = obj.size();
    const std::size_t m = rows.size();
    if (m < d) return std::nullopt;
    std::vector<std::size_t> sel(d);
    for (std::size_t i = 0; i < d; ++i) sel[i] = i;
    std::optional<Rational> best;
    while (true) {
      RatMat a(d, RatVec(d));
      RatVec b(d);
      for (std::size_t i = 0; i < d; ++i) {
        a[i] = rows[sel[i]];
        b[i] = rhs[sel[i]];
      }
      if (auto x = gauss_unique(std::move(a), std::move(b)); x && feasible(*x)) {
        Rational v(0);
        for (std::size_t j = 0; j < d; ++j) v += obj[j] * (*x)[j];
        if (!best || cmp(v, *best) > 0) best = v;
      }
      std::size_t i = d;
      bool done = true;
      while (i > 0) {
        --i;
        if (sel[i] != i + m - d) {
          done = false;
          break;
        }
      }
      if (done) return best;
      ++sel[i];
      for (std::size_t j = i + 1; j < d; ++j) sel[j] = sel[j - 1] + 1;
    }
  }
};

// hand-built unit-ball rows per norm family, independent of the library
inline BruteLp ball_lp(const std::string& family, std::size_t dim) {
  BruteLp lp;
  auto unit_row = [&](std::size_t i, int s) {
    RatVec r(dim, Rational(0));
    r[i] = s;
    return r;
  };
  if (family == "supC0") {
    for (std::size_t i = 0; i < dim; ++i) {
      lp.add(unit_row(i, 1), Rational(1));
      lp.add(unit_row(i, -1), Rational(1));
    }
  } else if (family == "ell1") {
    for (std::size_t mask = 0; mask < (std::size_t{1} << dim); ++mask) {
      RatVec r(dim);
      for (std::size_t i = 0; i < dim; ++i) r[i] = (mask >> i) & 1 ? 1 : -1;
      lp.add(std::move(r), Rational(1));
    }
  } else if (family == "bvC0") {
    // coordinates are window indices 0..dim-1; requires dim >= 2
    for (std::size_t i = 0; i < 2; ++i) {
      lp.add(unit_row(i, 1), Rational(1));
      lp.add(unit_row(i, -1), Rational(1));
    }
    for (std::size_t k = 2; k < dim; ++k) {
      RatVec r(dim, Rational(0));
      r[1] = 1;
      r[k] = 1;
      lp.add(r, Rational(1));
      for (auto& v : r) v = -v;
      lp.add(std::move(r), Rational(1));
    }
  } else {
    throw convlab::Error("oracle: unknown family " + family);
  }
  return lp;
}

/** Independent dual norm: brute-force max of <f, x> over the unit ball. */
inline Rational dual_norm(const std::string& family, const std::vector<uint32_t>& window,
                          const convlab::Functional& f) {
  BruteLp lp = ball_lp(family, window.size());
  RatVec obj(window.size(), Rational(0));
  for (std::size_t i = 0; i < window.size(); ++i) obj[i] = f.at(window[i]);
  auto v = lp.maximize(obj);
  if (!v) throw convlab::Error("oracle dual norm failed");
  return *v;
}

/** splitmix64-based deterministic generator (portable across platforms). */
struct Rng {
  uint64_t state;

  explicit Rng(uint64_t seed) : state(seed) {}

  uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  long integer(long lo, long hi) {  // inclusive
    return lo + static_cast<long>(next() % static_cast<uint64_t>(hi - lo + 1));
  }

  Rational rational(long max_num, long max_den) {
    long num = integer(-max_num, max_num);
    long den = integer(1, max_den);
    return convlab::rat(num, den);
  }

  convlab::Vector vector(const std::vector<uint32_t>& window, long max_num, long max_den) {
    std::vector<convlab::Vector::Entry> e;
    for (uint32_t i : window) {
      Rational v = rational(max_num, max_den);
      if (sgn(v) != 0) e.emplace_back(i, v);
    }
    return convlab::Vector(std::move(e));
  }

  convlab::Functional functional(const std::vector<uint32_t>& window, long max_num,
                                 long max_den) {
    std::vector<convlab::Functional::Entry> e;
    for (uint32_t i : window) {
      Rational v = rational(max_num, max_den);
      if (sgn(v) != 0) e.emplace_back(i, v);
    }
    return convlab::Functional(std::move(e));
  }
};

}  // namespace oracle
