#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "convlab/linalg.hpp"
#include "convlab/rational.hpp"

namespace convlab::minnorm {

struct PointResult {
  Rational sq_dist;
  RatVec point;
};

namespace detail {

// minimizer of ||sum a_i p_i||^2 subject to sum a_i = 1 over aff(points[S])
inline std::optional<RatVec> affine_minimizer(const RatMat& pts,
                                              const std::vector<std::size_t>& s) {
  const std::size_t k = s.size();
  RatMat sys(k + 1, RatVec(k + 1, Rational(0)));
  RatVec rhs(k + 1, Rational(0));
  rhs[0] = 1;
  for (std::size_t j = 0; j < k; ++j) sys[0][j + 1] = 1;
  for (std::size_t i = 0; i < k; ++i) {
    sys[i + 1][0] = 1;
    for (std::size_t j = 0; j < k; ++j)
      sys[i + 1][j + 1] = linalg::dot(pts[s[i]], pts[s[j]]);
  }
  auto sol = linalg::solve(sys, rhs);
  if (!sol) return std::nullopt;
  return RatVec(sol->begin() + 1, sol->end());
}

}  // namespace detail

/**
 * Minimum-norm point of conv(points), Wolfe's algorithm with exact rational
 * arithmetic. Terminates finitely; no tolerances involved.
 */
inline PointResult min_norm_point(const RatMat& pts) {
  if (pts.empty()) throw Error("min_norm_point: empty point set");
  const std::size_t d = pts[0].size();
  // start from the point of smallest norm
  std::size_t start = 0;
  Rational best_sq = linalg::dot(pts[0], pts[0]);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    Rational sq = linalg::dot(pts[i], pts[i]);
    if (cmp(sq, best_sq) < 0) {
      best_sq = sq;
      start = i;
    }
  }
  std::vector<std::size_t> corral{start};
  RatVec w{Rational(1)};
  RatVec x = pts[start];

  auto rebuild_x = [&]() {
    x.assign(d, Rational(0));
    for (std::size_t i = 0; i < corral.size(); ++i)
      for (std::size_t j = 0; j < d; ++j) x[j] += w[i] * pts[corral[i]][j];
  };

  const std::size_t max_major = 4 * (pts.size() + 2) * (pts.size() + 2) + 64;
  for (std::size_t iter = 0; iter < max_major; ++iter) {
    Rational xx = linalg::dot(x, x);
    // most violated point
    std::size_t enter = pts.size();
    Rational best;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      Rational v = linalg::dot(x, pts[i]);
      if (cmp(v, xx) < 0 && (enter == pts.size() || cmp(v, best) < 0)) {
        enter = i;
        best = v;
      }
    }
    if (enter == pts.size()) return PointResult{xx, x};
    for (std::size_t idx : corral)
      if (idx == enter) throw Error("min_norm_point: corral invariant violated");
    corral.push_back(enter);
    w.push_back(Rational(0));
    // minor cycle
    while (true) {
      auto v = detail::affine_minimizer(pts, corral);
      if (!v) throw Error("min_norm_point: affinely dependent corral");
      bool interior = true;
      for (const auto& vi : *v)
        if (sgn(vi) <= 0) interior = false;
      if (interior) {
        w = *v;
        rebuild_x();
        break;
      }
      // step towards v until the first weight hits zero
      Rational theta(1);
      for (std::size_t i = 0; i < corral.size(); ++i) {
        if (sgn((*v)[i]) <= 0) {
          Rational denom = w[i] - (*v)[i];
          if (sgn(denom) > 0) {
            Rational t = w[i] / denom;
            if (cmp(t, theta) < 0) theta = t;
          }
        }
      }
      if (sgn(theta) == 0) throw Error("min_norm_point: zero line-search step");
      for (std::size_t i = 0; i < corral.size(); ++i)
        w[i] = w[i] + theta * ((*v)[i] - w[i]);
      std::vector<std::size_t> keep_idx;
      RatVec keep_w;
      for (std::size_t i = 0; i < corral.size(); ++i) {
        if (sgn(w[i]) > 0) {
          keep_idx.push_back(corral[i]);
          keep_w.push_back(w[i]);
        }
      }
      if (keep_idx.empty()) {
        keep_idx.push_back(corral[0]);
        keep_w.push_back(Rational(1));
      }
      corral = std::move(keep_idx);
      w = std::move(keep_w);
      rebuild_x();
    }
  }
  throw Error("min_norm_point failed to converge");
}

/** Squared Euclidean distance from x0 to conv(points). */
inline PointResult sq_distance_to_hull(const RatVec& x0, RatMat pts) {
  for (auto& p : pts)
    for (std::size_t j = 0; j < p.size(); ++j) p[j] -= x0[j];
  PointResult r = min_norm_point(pts);
  for (std::size_t j = 0; j < r.point.size(); ++j) r.point[j] += x0[j];
  return r;
}

/**
 * Exact Euclidean projection onto {x : Ax <= b, Ex = c} by enumerating
 * candidate active sets. The affine minimizer for the true active set equals
 * the projection, so scanning all row subsets and keeping feasible
 * candidates is exact. Desk-scale row/dimension counts only.
 */
inline std::optional<PointResult> project_onto_region(const RatVec& x0,
                                                      const linalg::HRep& h,
                                                      std::size_t subset_limit = 300000) {
  const std::size_t d = x0.size();
  const std::size_t m = h.a.size();
  std::optional<PointResult> best;

  auto try_active = [&](const std::vector<std::size_t>& act) {
    RatMat rows = h.eq;
    RatVec rhs = h.c;
    for (std::size_t i : act) {
      rows.push_back(h.a[i]);
      rhs.push_back(h.b[i]);
    }
    RatVec y;
    if (rows.empty()) {
      y = x0;
    } else {
      // minimize ||y - x0||^2 with rows*y = rhs: y = x0 + R^T lam
      // reduce to independent rows first
      RatMat aug = rows;
      for (std::size_t i = 0; i < aug.size(); ++i) aug[i].push_back(rhs[i]);
      std::vector<int> pivots;
      std::size_t rank = linalg::rref(aug, &pivots);
      for (int p : pivots)
        if (static_cast<std::size_t>(p) == d) return;  // inconsistent active set
      for (std::size_t i = rank; i < aug.size(); ++i)
        if (sgn(aug[i][d]) != 0) return;
      RatMat r2(rank, RatVec(d));
      RatVec c2(rank);
      for (std::size_t i = 0; i < rank; ++i) {
        for (std::size_t j = 0; j < d; ++j) r2[i][j] = aug[i][j];
        c2[i] = aug[i][d];
      }
      RatMat gram(rank, RatVec(rank));
      RatVec g_rhs(rank);
      for (std::size_t i = 0; i < rank; ++i) {
        for (std::size_t j = 0; j < rank; ++j) gram[i][j] = linalg::dot(r2[i], r2[j]);
        g_rhs[i] = c2[i] - linalg::dot(r2[i], x0);
      }
      auto lam = linalg::solve(gram, g_rhs);
      if (!lam) return;
      y = x0;
      for (std::size_t i = 0; i < rank; ++i)
        for (std::size_t j = 0; j < d; ++j) y[j] += (*lam)[i] * r2[i][j];
    }
    if (!linalg::hrep_satisfied(h, y)) return;
    RatVec diff(d);
    for (std::size_t j = 0; j < d; ++j) diff[j] = y[j] - x0[j];
    Rational sq = linalg::dot(diff, diff);
    if (!best || cmp(sq, best->sq_dist) < 0) best = PointResult{sq, y};
  };

  std::size_t count = 0;
  std::vector<std::size_t> sel;
  auto recurse = [&](auto&& self, std::size_t from, std::size_t depth) -> void {
    if (++count > subset_limit) throw Error("region projection work limit exceeded");
    try_active(sel);
    if (depth == d) return;
    for (std::size_t i = from; i < m; ++i) {
      sel.push_back(i);
      self(self, i + 1, depth + 1);
      sel.pop_back();
    }
  };
  recurse(recurse, 0, 0);
  return best;
}

}  // namespace convlab::minnorm
