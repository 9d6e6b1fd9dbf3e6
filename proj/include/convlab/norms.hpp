#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "convlab/coords.hpp"
#include "convlab/linalg.hpp"
#include "convlab/lp.hpp"
#include "convlab/scalar.hpp"
#include "convlab/window.hpp"

namespace convlab {

class NormSpec;
struct DualBallDescription;
inline Scalar predual_norm_from_dual_ball(const DualBallDescription& ball,
                                          const Vector& x);

/**
 * Symmetric convex w*-compact set of functionals described by slab
 * constraints |<Lam, v>| <= b intersected with a scaled dual ball of a base
 * norm. The predual norm it induces on vectors is its support function.
 */
struct DualBallDescription {
  std::vector<std::pair<Vector, Rational>> slabs;
  Rational radius;
  std::shared_ptr<const NormSpec> base;
  Window window;
};

/**
 * Norm family descriptor. Evaluators live in free functions below; the spec
 * object itself is an immutable value.
 */
class NormSpec {
 public:
  enum class Family { SupC0, Ell1, Ell2, BvC0, PredualOfBall, Product2 };

  static NormSpec sup_c0() { return NormSpec(Family::SupC0); }
  static NormSpec ell1() { return NormSpec(Family::Ell1); }
  static NormSpec ell2() { return NormSpec(Family::Ell2); }
  /** max(|x0|, |x1|, sup_{n>=2} |x_n + x_1|); the renormed c0 of the worked example. */
  static NormSpec bv_c0() { return NormSpec(Family::BvC0); }

  static NormSpec predual_of_ball(DualBallDescription ball);
  static NormSpec product2(NormSpec inner, uint32_t scalar_index) {
    if (inner.family_ == Family::Product2)
      throw NormError("nested product2 norms are not supported");
    NormSpec n(Family::Product2);
    n.inner_ = std::make_shared<const NormSpec>(std::move(inner));
    n.scalar_index_ = scalar_index;
    return n;
  }

  Family family() const { return family_; }
  const DualBallDescription& ball() const {
    if (!ball_) throw NormError("norm has no dual-ball description");
    return *ball_;
  }
  const NormSpec& inner() const {
    if (!inner_) throw NormError("norm has no inner factor");
    return *inner_;
  }
  uint32_t scalar_index() const { return scalar_index_; }

  bool polyhedral() const;

  std::string name() const {
    switch (family_) {
      case Family::SupC0:
        return "supC0";
      case Family::Ell1:
        return "ell1";
      case Family::Ell2:
        return "ell2";
      case Family::BvC0:
        return "bvC0";
      case Family::PredualOfBall:
        return "predualOfBall";
      case Family::Product2:
        return "product2(" + inner_->name() + ")";
    }
    return "?";
  }

 private:
  explicit NormSpec(Family f) : family_(f) {}

  Family family_;
  std::shared_ptr<const DualBallDescription> ball_;
  std::shared_ptr<const NormSpec> inner_;
  uint32_t scalar_index_ = 0;
};

Scalar dual_norm_eval(const NormSpec& norm, const Functional& f);

inline bool NormSpec::polyhedral() const {
  switch (family_) {
    case Family::SupC0:
    case Family::Ell1:
    case Family::BvC0:
      return true;
    case Family::PredualOfBall:
      return ball_->base->polyhedral();
    default:
      return false;
  }
}

inline NormSpec NormSpec::predual_of_ball(DualBallDescription ball) {
  if (sgn(ball.radius) <= 0)
    throw NormError("predualOfBall: ball radius must be positive");
  for (const auto& [v, bound] : ball.slabs) {
    if (v.zero()) throw NormError("predualOfBall: zero slab vector");
    if (sgn(bound) <= 0) throw NormError("predualOfBall: slab bound must be positive");
    if (!ball.window.contains_all(v.support()))
      throw NormError("predualOfBall: slab vector leaves the declared window");
  }
  if (!ball.base) throw NormError("predualOfBall: missing base norm");
  if (ball.base->family() == Family::Product2)
    throw NormError("predualOfBall: product base is not supported");
  NormSpec n(Family::PredualOfBall);
  n.ball_ = std::make_shared<const DualBallDescription>(std::move(ball));
  return n;
}

/** Indices the norm couples beyond a given support (bvC0 always sees 0 and 1). */
inline std::vector<uint32_t> norm_index_closure(const NormSpec& norm,
                                                std::vector<uint32_t> e) {
  if (norm.family() == NormSpec::Family::BvC0) {
    e.push_back(0);
    e.push_back(1);
  }
  if (norm.family() == NormSpec::Family::Product2) {
    e.push_back(norm.scalar_index());
    return sorted_unique(norm_index_closure(norm.inner(), std::move(e)));
  }
  return sorted_unique(std::move(e));
}

inline void require_window_compatible(const NormSpec& norm, const Window& w) {
  switch (norm.family()) {
    case NormSpec::Family::BvC0:
      if (!w.contains(0) || !w.contains(1))
        throw WindowError("bvC0 requires indices {0,1} present in the window");
      return;
    case NormSpec::Family::PredualOfBall:
      if (!norm.ball().window.contains_all(w.indices()))
        throw WindowError("predualOfBall norm is restricted to its declared window");
      return;
    case NormSpec::Family::Product2:
      if (!w.contains(norm.scalar_index()))
        throw WindowError("product2 requires the scalar slot in the window");
      return;
    default:
      return;
  }
}

namespace detail {

inline RatVec to_dense(const std::vector<uint32_t>& e, const Vector& v) {
  RatVec out(e.size(), Rational(0));
  for (std::size_t i = 0; i < e.size(); ++i) out[i] = v.at(e[i]);
  return out;
}
inline RatVec to_dense(const std::vector<uint32_t>& e, const Functional& f) {
  RatVec out(e.size(), Rational(0));
  for (std::size_t i = 0; i < e.size(); ++i) out[i] = f.at(e[i]);
  return out;
}
inline Vector vector_from_dense(const std::vector<uint32_t>& e, const RatVec& d) {
  std::vector<Vector::Entry> ent;
  for (std::size_t i = 0; i < e.size(); ++i)
    if (sgn(d[i]) != 0) ent.emplace_back(e[i], d[i]);
  return Vector(std::move(ent));
}
inline Functional functional_from_dense(const std::vector<uint32_t>& e, const RatVec& d) {
  std::vector<Functional::Entry> ent;
  for (std::size_t i = 0; i < e.size(); ++i)
    if (sgn(d[i]) != 0) ent.emplace_back(e[i], d[i]);
  return Functional(std::move(ent));
}

}  // namespace detail

inline std::vector<Functional> ball_rows(const NormSpec& norm, std::vector<uint32_t> e);
inline std::vector<Vector> ball_vertices(const NormSpec& norm, std::vector<uint32_t> e);

/** Unit-ball H-description {x : <g, x> <= 1 for all g}; symmetric row family. */
inline std::vector<Functional> ball_rows(const NormSpec& norm, std::vector<uint32_t> e) {
  e = norm_index_closure(norm, std::move(e));
  std::vector<Functional> rows;
  switch (norm.family()) {
    case NormSpec::Family::SupC0:
      for (uint32_t i : e) {
        rows.push_back(Functional::unit(i));
        rows.push_back(Functional::unit(i).negated());
      }
      return rows;
    case NormSpec::Family::Ell1: {
      if (e.size() > 16) throw NormError("ell1 ball H-description too large");
      const std::size_t n = e.size();
      for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::vector<Functional::Entry> ent;
        for (std::size_t i = 0; i < n; ++i)
          ent.emplace_back(e[i], Rational((mask >> i) & 1 ? 1 : -1));
        rows.push_back(Functional(std::move(ent)));
      }
      return rows;
    }
    case NormSpec::Family::BvC0: {
      for (uint32_t i : {uint32_t{0}, uint32_t{1}}) {
        rows.push_back(Functional::unit(i));
        rows.push_back(Functional::unit(i).negated());
      }
      for (uint32_t k : e) {
        if (k < 2) continue;
        Functional g = Functional::unit(1).plus(Functional::unit(k));
        rows.push_back(g);
        rows.push_back(g.negated());
      }
      return rows;
    }
    case NormSpec::Family::PredualOfBall: {
      if (!norm.polyhedral())
        throw NormError("predualOfBall ball rows need a polyhedral base");
      const auto& ball = norm.ball();
      const auto& win = ball.window.indices();
      // H-rep of B in functional space over the ball window
      linalg::HRep h;
      for (const auto& [v, bound] : ball.slabs) {
        RatVec row = detail::to_dense(win, v);
        h.a.push_back(row);
        h.b.push_back(bound);
        for (auto& c : row) c = -c;
        h.a.push_back(row);
        h.b.push_back(bound);
      }
      for (const auto& bv : ball_vertices(*ball.base, win)) {
        h.a.push_back(detail::to_dense(win, bv));
        h.b.push_back(ball.radius);
      }
      for (const auto& vert : linalg::enumerate_vertices(h))
        rows.push_back(detail::functional_from_dense(win, vert));
      return rows;
    }
    default:
      throw NormError(norm.name() + ": no polyhedral ball description");
  }
}

/** Vertices of the unit ball restricted to the given coordinates. */
inline std::vector<Vector> ball_vertices(const NormSpec& norm, std::vector<uint32_t> e) {
  e = norm_index_closure(norm, std::move(e));
  std::vector<Vector> verts;
  switch (norm.family()) {
    case NormSpec::Family::SupC0: {
      if (e.size() > 16) throw NormError("sup-ball vertex set too large");
      const std::size_t n = e.size();
      for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::vector<Vector::Entry> ent;
        for (std::size_t i = 0; i < n; ++i)
          ent.emplace_back(e[i], Rational((mask >> i) & 1 ? 1 : -1));
        verts.push_back(Vector(std::move(ent)));
      }
      return verts;
    }
    case NormSpec::Family::Ell1:
      for (uint32_t i : e) {
        verts.push_back(Vector::unit(i));
        verts.push_back(Vector::unit(i).negated());
      }
      return verts;
    case NormSpec::Family::BvC0:
    case NormSpec::Family::PredualOfBall: {
      auto rows = ball_rows(norm, e);
      linalg::HRep h;
      for (const auto& g : rows) {
        h.a.push_back(detail::to_dense(e, g));
        h.b.push_back(Rational(1));
      }
      for (const auto& v : linalg::enumerate_vertices(h))
        verts.push_back(detail::vector_from_dense(e, v));
      return verts;
    }
    default:
      throw NormError(norm.name() + ": no polyhedral vertex description");
  }
}

/** Affine expression over LP variables. */
struct AffExpr {
  std::vector<lp::Term> terms;
  Rational constant;

  static AffExpr of(const Rational& c) { return AffExpr{{}, c}; }
  static AffExpr var(int v) { return AffExpr{{{v, Rational(1)}}, Rational(0)}; }
};

inline AffExpr aff_combine(const std::vector<std::pair<Rational, const AffExpr*>>& parts) {
  AffExpr out{{}, Rational(0)};
  for (const auto& [c, ex] : parts) {
    if (sgn(c) == 0) continue;
    out.constant += c * ex->constant;
    for (const auto& t : ex->terms) out.terms.push_back({t.var, c * t.coef});
  }
  return out;
}

// appends "lhs <= rhs" as an LP row
inline void append_le(lp::Problem& p, const AffExpr& lhs, const AffExpr& rhs) {
  std::vector<lp::Term> terms = lhs.terms;
  for (const auto& t : rhs.terms) terms.push_back({t.var, -t.coef});
  p.add(std::move(terms), lp::Rel::Le, rhs.constant - lhs.constant);
}
inline void append_eq(lp::Problem& p, const AffExpr& lhs, const AffExpr& rhs) {
  std::vector<lp::Term> terms = lhs.terms;
  for (const auto& t : rhs.terms) terms.push_back({t.var, -t.coef});
  p.add(std::move(terms), lp::Rel::Eq, rhs.constant - lhs.constant);
}

/**
 * Encodes norm(expr) <= bound over the coordinates in `e` with exact LP rows.
 * Polyhedral families only.
 */
inline void append_norm_le(lp::Problem& p, const NormSpec& norm,
                           const std::function<AffExpr(uint32_t)>& expr,
                           const AffExpr& bound, std::vector<uint32_t> e) {
  e = norm_index_closure(norm, std::move(e));
  auto row_le = [&](const Functional& g) {
    std::vector<std::pair<Rational, const AffExpr*>> parts;
    std::vector<AffExpr> keep;
    keep.reserve(g.entries().size());
    for (const auto& [idx, coef] : g.entries()) keep.push_back(expr(idx));
    std::size_t k = 0;
    for (const auto& [idx, coef] : g.entries()) parts.push_back({coef, &keep[k++]});
    append_le(p, aff_combine(parts), bound);
  };
  switch (norm.family()) {
    case NormSpec::Family::SupC0:
      for (uint32_t i : e) {
        row_le(Functional::unit(i));
        row_le(Functional::unit(i).negated());
      }
      return;
    case NormSpec::Family::Ell1: {
      std::vector<lp::Term> sum;
      for (uint32_t i : e) {
        int u = p.add_var(true);
        AffExpr uvar = AffExpr::var(u);
        AffExpr ei = expr(i);
        append_le(p, ei, uvar);
        AffExpr neg{{}, -ei.constant};
        for (const auto& t : ei.terms) neg.terms.push_back({t.var, -t.coef});
        append_le(p, neg, uvar);
        sum.push_back({u, Rational(1)});
      }
      append_le(p, AffExpr{std::move(sum), Rational(0)}, bound);
      return;
    }
    case NormSpec::Family::BvC0:
    case NormSpec::Family::PredualOfBall:
      for (const auto& g : ball_rows(norm, e)) row_le(g);
      return;
    default:
      throw NormError(norm.name() + ": not encodable as LP rows");
  }
}

/** Norm of a vector; exact for polyhedral families, exact root for ell2. */
inline Scalar norm_eval(const NormSpec& norm, const Vector& x) {
  switch (norm.family()) {
    case NormSpec::Family::SupC0: {
      Rational best(0);
      for (const auto& [i, v] : x.entries()) best = std::max(best, Rational(abs(v)));
      return Scalar::exact(best);
    }
    case NormSpec::Family::Ell1: {
      Rational acc(0);
      for (const auto& [i, v] : x.entries()) acc += abs(v);
      return Scalar::exact(acc);
    }
    case NormSpec::Family::Ell2: {
      Rational acc(0);
      for (const auto& [i, v] : x.entries()) acc += v * v;
      return Scalar::root_of(acc);
    }
    case NormSpec::Family::BvC0: {
      Rational x1 = x.at(1);
      Rational best = abs(x.at(0));
      best = std::max(best, Rational(abs(x1)));
      for (const auto& [i, v] : x.entries())
        if (i >= 2) best = std::max(best, Rational(abs(v + x1)));
      // tail coordinates are zero, contributing |0 + x1|
      best = std::max(best, Rational(abs(x1)));
      return Scalar::exact(best);
    }
    case NormSpec::Family::PredualOfBall:
      return predual_norm_from_dual_ball(norm.ball(), x);
    case NormSpec::Family::Product2: {
      Rational r = x.at(norm.scalar_index());
      std::vector<Vector::Entry> part;
      for (const auto& en : x.entries())
        if (en.first != norm.scalar_index()) part.push_back(en);
      Scalar in = norm_eval(norm.inner(), Vector(std::move(part)));
      return Scalar::root_of(in.square() + r * r);
    }
  }
  throw NormError("unknown norm family");
}

/**
 * Dual norm sup{<f, x> : norm(x) <= 1}. Documented closed forms for the
 * l1/linf pair and the self-dual l2; everything else goes through the exact
 * simplex.
 */
inline Scalar dual_norm_eval(const NormSpec& norm, const Functional& f) {
  switch (norm.family()) {
    case NormSpec::Family::SupC0: {
      Rational acc(0);
      for (const auto& [i, v] : f.entries()) acc += abs(v);
      return Scalar::exact(acc);
    }
    case NormSpec::Family::Ell1: {
      Rational best(0);
      for (const auto& [i, v] : f.entries()) best = std::max(best, Rational(abs(v)));
      return Scalar::exact(best);
    }
    case NormSpec::Family::Ell2: {
      Rational acc(0);
      for (const auto& [i, v] : f.entries()) acc += v * v;
      return Scalar::root_of(acc);
    }
    case NormSpec::Family::BvC0: {
      std::vector<uint32_t> e = norm_index_closure(norm, f.support());
      lp::Problem p;
      std::vector<lp::Term> obj;
      std::vector<int> vars(e.size());
      for (std::size_t i = 0; i < e.size(); ++i) {
        vars[i] = p.add_var();
        Rational c = f.at(e[i]);
        if (sgn(c) != 0) obj.push_back({vars[i], c});
      }
      auto expr = [&](uint32_t idx) {
        for (std::size_t i = 0; i < e.size(); ++i)
          if (e[i] == idx) return AffExpr::var(vars[i]);
        return AffExpr::of(Rational(0));
      };
      append_norm_le(p, norm, expr, AffExpr::of(Rational(1)), e);
      p.maximize(std::move(obj));
      auto res = lp::solve(p);
      if (res.status != lp::Status::Optimal)
        throw LpError("degenerate norm: dual-norm program not optimal");
      return Scalar::exact(res.value);
    }
    case NormSpec::Family::PredualOfBall: {
      const auto& ball = norm.ball();
      if (!ball.window.contains_all(f.support()))
        throw WindowError("functional leaves the predualOfBall window");
      Scalar best = Scalar::exact(Rational(0));
      for (const auto& [v, bound] : ball.slabs) {
        Rational val = abs(pairing(f, v)) / bound;
        best = scalar_max(best, Scalar::exact(val));
      }
      Scalar base_part =
          dual_norm_eval(*ball.base, f) / Scalar::exact(ball.radius);
      return scalar_max(best, base_part);
    }
    case NormSpec::Family::Product2: {
      Rational r = f.at(norm.scalar_index());
      std::vector<Functional::Entry> part;
      for (const auto& en : f.entries())
        if (en.first != norm.scalar_index()) part.push_back(en);
      Scalar in = dual_norm_eval(norm.inner(), Functional(std::move(part)));
      return Scalar::root_of(in.square() + r * r);
    }
  }
  throw NormError("unknown norm family");
}

/** Support function sup{<Lam, x> : Lam in B} of a dual-ball description. */
inline Scalar predual_norm_from_dual_ball(const DualBallDescription& ball,
                                          const Vector& x) {
  if (!ball.window.contains_all(x.support()))
    throw WindowError("vector leaves the predualOfBall window");
  if (!ball.base->polyhedral())
    throw NormError(
        "predual norm evaluation requires a polyhedral base; non-polyhedral "
        "constructions expose only dual-side quantities");
  std::vector<uint32_t> e = ball.window.indices();
  lp::Problem p;
  std::vector<int> vars(e.size());
  std::vector<lp::Term> obj;
  for (std::size_t i = 0; i < e.size(); ++i) {
    vars[i] = p.add_var();
    Rational c = x.at(e[i]);
    if (sgn(c) != 0) obj.push_back({vars[i], c});
  }
  auto var_of = [&](uint32_t idx) -> int {
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i] == idx) return vars[i];
    return -1;
  };
  for (const auto& [v, bound] : ball.slabs) {
    std::vector<lp::Term> terms;
    for (const auto& [idx, c] : v.entries()) terms.push_back({var_of(idx), c});
    p.add(terms, lp::Rel::Le, bound);
    for (auto& t : terms) t.coef = -t.coef;
    p.add(std::move(terms), lp::Rel::Le, bound);
  }
  // base dual norm of Lam <= radius, rows indexed by base-ball vertices
  for (const auto& bv : ball_vertices(*ball.base, e)) {
    std::vector<lp::Term> terms;
    for (const auto& [idx, c] : bv.entries()) {
      int var = var_of(idx);
      if (var >= 0) terms.push_back({var, c});
    }
    p.add(std::move(terms), lp::Rel::Le, ball.radius);
  }
  p.maximize(std::move(obj));
  auto res = lp::solve(p);
  if (res.status == lp::Status::Unbounded)
    throw LpError("degenerate dual-ball description: support function unbounded");
  if (res.status != lp::Status::Optimal)
    throw LpError("dual-ball support program failed");
  return Scalar::exact(res.value);
}

/**
 * rho(mu, nu) = sup{|nu(x) - mu(x)| : x in base unit ball}, computed exactly
 * by splitting the base ball along the linearity regions of each norm and
 * maximizing the convex remainder over region vertices.
 */
inline Rational norm_metric_rho(const NormSpec& mu, const NormSpec& nu,
                                const NormSpec& base, const Window& window) {
  if (!mu.polyhedral() || !nu.polyhedral() || !base.polyhedral())
    throw NormError("norm_metric_rho requires polyhedral families");
  std::vector<uint32_t> e = window.indices();
  e = norm_index_closure(mu, e);
  e = norm_index_closure(nu, e);
  e = norm_index_closure(base, e);
  if (e.size() > 6) throw NormError("norm_metric_rho window too large");
  std::vector<RatVec> base_rows;
  for (const auto& g : ball_rows(base, e)) base_rows.push_back(detail::to_dense(e, g));
  Rational best(0);
  auto half = [&](const NormSpec& F, const NormSpec& G) {
    std::vector<RatVec> rows_f;
    for (const auto& g : ball_rows(F, e)) rows_f.push_back(detail::to_dense(e, g));
    for (std::size_t r = 0; r < rows_f.size(); ++r) {
      linalg::HRep h;
      for (const auto& br : base_rows) {
        h.a.push_back(br);
        h.b.push_back(Rational(1));
      }
      for (std::size_t r2 = 0; r2 < rows_f.size(); ++r2) {
        if (r2 == r) continue;
        RatVec diff(e.size());
        for (std::size_t i = 0; i < e.size(); ++i) diff[i] = rows_f[r2][i] - rows_f[r][i];
        h.a.push_back(std::move(diff));
        h.b.push_back(Rational(0));
      }
      for (const auto& v : linalg::enumerate_vertices(h)) {
        Scalar g_val = norm_eval(G, detail::vector_from_dense(e, v));
        Rational val = g_val.rational() - linalg::dot(rows_f[r], v);
        if (cmp(val, best) > 0) best = val;
      }
    }
  };
  half(mu, nu);
  half(nu, mu);
  return best;
}

}  // namespace convlab
