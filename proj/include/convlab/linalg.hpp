#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "convlab/rational.hpp"

namespace convlab::linalg {

/** In-place reduced row echelon form; returns rank, pivot columns optional. */
inline std::size_t rref(RatMat& m, std::vector<int>* pivot_cols = nullptr) {
  if (pivot_cols) pivot_cols->clear();
  if (m.empty()) return 0;
  const std::size_t rows = m.size(), cols = m[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && sgn(m[piv][c]) == 0) ++piv;
    if (piv == rows) continue;
    std::swap(m[r], m[piv]);
    Rational inv = Rational(1) / m[r][c];
    for (std::size_t j = c; j < cols; ++j) m[r][j] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || sgn(m[i][c]) == 0) continue;
      Rational f = m[i][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    if (pivot_cols) pivot_cols->push_back(static_cast<int>(c));
    ++r;
  }
  return r;
}

/** Solves A x = b; returns any particular solution or nullopt if inconsistent. */
inline std::optional<RatVec> solve(RatMat a, const RatVec& b) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows == 0 ? 0 : a[0].size();
  for (std::size_t i = 0; i < rows; ++i) a[i].push_back(b[i]);
  std::vector<int> pivots;
  std::size_t rank = rref(a, &pivots);
  for (std::size_t i = rank; i < rows; ++i)
    if (sgn(a[i][cols]) != 0) return std::nullopt;
  for (int p : pivots)
    if (static_cast<std::size_t>(p) == cols) return std::nullopt;
  RatVec x(cols, Rational(0));
  for (std::size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = a[i][cols];
  return x;
}

/** Basis of the null space of A (columns = variables). */
inline RatMat kernel_basis(RatMat a) {
  if (a.empty()) return {};
  const std::size_t cols = a[0].size();
  std::vector<int> pivots;
  std::size_t rank = rref(a, &pivots);
  std::vector<bool> is_pivot(cols, false);
  for (int p : pivots) is_pivot[p] = true;
  RatMat basis;
  for (std::size_t free_c = 0; free_c < cols; ++free_c) {
    if (is_pivot[free_c]) continue;
    RatVec v(cols, Rational(0));
    v[free_c] = 1;
    for (std::size_t i = 0; i < rank; ++i) v[pivots[i]] = -a[i][free_c];
    basis.push_back(std::move(v));
  }
  return basis;
}

inline Rational dot(const RatVec& a, const RatVec& b) {
  Rational acc(0);
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

struct HRep {
  RatMat a;   // inequality rows: a_i . x <= b_i
  RatVec b;
  RatMat eq;  // equality rows: eq_i . x = c_i
  RatVec c;
};

inline bool hrep_satisfied(const HRep& h, const RatVec& x) {
  for (std::size_t i = 0; i < h.a.size(); ++i)
    if (cmp(dot(h.a[i], x), h.b[i]) > 0) return false;
  for (std::size_t i = 0; i < h.eq.size(); ++i)
    if (cmp(dot(h.eq[i], x), h.c[i]) != 0) return false;
  return true;
}

/**
 * Brute-force vertex enumeration for small H-polyhedra: every vertex is the
 * unique solution of d active rows. Intended for desk-scale dimensions only.
 */
inline RatMat enumerate_vertices(const HRep& h, std::size_t work_limit = 2000000) {
  const std::size_t d = h.a.empty() ? (h.eq.empty() ? 0 : h.eq[0].size()) : h.a[0].size();
  if (d == 0) return {};
  const std::size_t m = h.a.size();
  std::size_t eq_rank = 0;
  if (!h.eq.empty()) {
    RatMat chk = h.eq;
    eq_rank = rref(chk);
  }
  std::size_t need = d > eq_rank ? d - eq_rank : 0;
  RatMat verts;
  std::vector<std::size_t> pick(need);
  // iterate over subsets of inequality rows of size `need`
  std::size_t work = 0;
  auto emit = [&](const std::vector<std::size_t>& sel) {
    RatMat sys = h.eq;
    RatVec rhs = h.c;
    for (std::size_t idx : sel) {
      sys.push_back(h.a[idx]);
      rhs.push_back(h.b[idx]);
    }
    if (++work > work_limit) throw Error("vertex enumeration work limit exceeded");
    // require a unique solution: rank d
    RatMat chk = sys;
    if (rref(chk) != d) return;
    auto x = solve(sys, rhs);
    if (!x || !hrep_satisfied(h, *x)) return;
    for (const auto& v : verts)
      if (v == *x) return;
    verts.push_back(std::move(*x));
  };
  if (need == 0) {
    emit({});
    return verts;
  }
  if (need > m) return verts;
  std::vector<std::size_t> sel(need);
  // lexicographic combinations
  for (std::size_t i = 0; i < need; ++i) sel[i] = i;
  while (true) {
    emit(sel);
    std::size_t i = need;
    while (i > 0) {
      --i;
      if (sel[i] != i + m - need) break;
      if (i == 0) return verts;
    }
    ++sel[i];
    for (std::size_t j = i + 1; j < need; ++j) sel[j] = sel[j - 1] + 1;
  }
}

/**
 * Extreme rays of {x : Ax <= 0, Eq x = 0}: directions fixed by d-1 active
 * rows (plus equalities), kept when they satisfy all homogeneous rows.
 */
inline RatMat enumerate_extreme_rays(const HRep& h, std::size_t work_limit = 2000000) {
  const std::size_t d = h.a.empty() ? (h.eq.empty() ? 0 : h.eq[0].size()) : h.a[0].size();
  if (d == 0) return {};
  const std::size_t m = h.a.size();
  auto homogeneous_ok = [&](const RatVec& r) {
    for (const auto& row : h.a)
      if (sgn(dot(row, r)) > 0) return false;
    for (const auto& row : h.eq)
      if (sgn(dot(row, r)) != 0) return false;
    return true;
  };
  RatMat rays;
  std::size_t work = 0;
  auto try_subset = [&](const std::vector<std::size_t>& sel) {
    if (++work > work_limit) throw Error("ray enumeration work limit exceeded");
    RatMat sys = h.eq;
    for (std::size_t idx : sel) sys.push_back(h.a[idx]);
    RatMat kb = kernel_basis(sys);
    if (kb.size() != 1) return;
    for (int s : {1, -1}) {
      RatVec r = kb[0];
      for (auto& v : r) v *= s;
      if (!homogeneous_ok(r)) continue;
      bool dup = false;
      for (const auto& existing : rays) {
        // same direction up to positive scale
        std::size_t j = 0;
        while (j < d && sgn(existing[j]) == 0 && sgn(r[j]) == 0) ++j;
        if (j < d && sgn(existing[j]) != 0 && sgn(r[j]) == sgn(existing[j])) {
          Rational scale = r[j] / existing[j];
          RatVec scaled = existing;
          for (auto& v : scaled) v *= scale;
          if (scaled == r) {
            dup = true;
            break;
          }
        }
      }
      if (!dup) rays.push_back(std::move(r));
    }
  };
  std::size_t eq_rank;
  {
    RatMat chk = h.eq;
    eq_rank = chk.empty() ? 0 : rref(chk);
  }
  std::size_t need = d >= eq_rank + 1 ? d - eq_rank - 1 : 0;
  if (need == 0) {
    try_subset({});
    return rays;
  }
  if (need > m) return rays;
  std::vector<std::size_t> sel(need);
  for (std::size_t i = 0; i < need; ++i) sel[i] = i;
  while (true) {
    try_subset(sel);
    std::size_t i = need;
    while (i > 0) {
      --i;
      if (sel[i] != i + m - need) break;
      if (i == 0) return rays;
    }
    ++sel[i];
    for (std::size_t j = i + 1; j < need; ++j) sel[j] = sel[j - 1] + 1;
  }
}

}  // namespace convlab::linalg
