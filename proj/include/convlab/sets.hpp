#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "convlab/coords.hpp"
#include "convlab/minnorm.hpp"
#include "convlab/norms.hpp"

namespace convlab {

class ConvexSet;
using ConvexSetPtr = std::shared_ptr<const ConvexSet>;

/**
 * Convex lower-semicontinuous piecewise-affine function: value at x is
 * max over pieces of <f, x> + b, plus infinity outside the (optional)
 * polytope domain. An empty piece list means the zero function, so a plain
 * domain is an indicator.
 */
struct PolyFunc {
  std::vector<std::pair<Functional, Rational>> pieces;
  std::optional<std::vector<Vector>> domain;  // polytope vertices

  static PolyFunc indicator(std::vector<Vector> domain_vertices) {
    return PolyFunc{{}, std::move(domain_vertices)};
  }
  bool is_indicator() const {
    bool trivial = true;
    for (const auto& [f, b] : pieces)
      if (!f.zero() || sgn(b) != 0) trivial = false;
    return trivial && domain.has_value();
  }
};

bool contains(const ConvexSet& c, const Vector& x);
Scalar distance(const Vector& x, const ConvexSet& c, const NormSpec& ambient);

/** Tagged union of the convex set shapes the constructions need. */
class ConvexSet {
 public:
  struct Hyperplane {
    Functional f;
    Rational a;
  };
  struct Halfspace {
    Functional f;
    Rational a;
    bool le;  // <f,x> <= a when true, >= a otherwise
  };
  struct NormBall {
    Vector center;
    Rational radius;
    NormSpec norm;
  };
  struct Polytope {
    std::vector<Vector> vertices;
  };
  struct MinkowskiSum {
    ConvexSetPtr base;
    NormBall ball;
  };
  struct Intersection {
    std::vector<ConvexSetPtr> members;
  };
  struct SubspaceSlice {
    std::vector<std::pair<Functional, Rational>> equalities;
    ConvexSetPtr base;
  };
  struct Epigraph {
    PolyFunc func;
    uint32_t scalar_index;
    NormSpec product_norm;
  };

  using Node = std::variant<Hyperplane, Halfspace, NormBall, Polytope, MinkowskiSum,
                            Intersection, SubspaceSlice, Epigraph>;

  static ConvexSet hyperplane(Functional f, Rational a) {
    if (f.zero()) throw SetError("hyperplane with zero functional");
    return ConvexSet(Hyperplane{std::move(f), std::move(a)});
  }
  static ConvexSet halfspace(Functional f, Rational a, bool le = true) {
    if (f.zero()) throw SetError("halfspace with zero functional");
    return ConvexSet(Halfspace{std::move(f), std::move(a), le});
  }
  static ConvexSet ball(Vector center, Rational radius, NormSpec norm) {
    if (sgn(radius) < 0) throw SetError("ball with negative radius");
    return ConvexSet(NormBall{std::move(center), std::move(radius), std::move(norm)});
  }
  static ConvexSet polytope(std::vector<Vector> vertices) {
    if (vertices.empty()) throw SetError("polytope needs at least one vertex");
    return ConvexSet(Polytope{std::move(vertices)});
  }
  static ConvexSet singleton(Vector v) { return polytope({std::move(v)}); }
  static ConvexSet minkowski_sum(ConvexSet base, NormBall ball) {
    return ConvexSet(
        MinkowskiSum{std::make_shared<const ConvexSet>(std::move(base)), std::move(ball)});
  }
  static ConvexSet intersection(std::vector<ConvexSet> members) {
    Intersection node;
    for (auto& m : members)
      node.members.push_back(std::make_shared<const ConvexSet>(std::move(m)));
    return ConvexSet(std::move(node));
  }
  static ConvexSet subspace_slice(std::vector<std::pair<Functional, Rational>> equalities,
                                  ConvexSet base) {
    return ConvexSet(SubspaceSlice{std::move(equalities),
                                   std::make_shared<const ConvexSet>(std::move(base))});
  }
  static ConvexSet epigraph(PolyFunc func, uint32_t scalar_index, NormSpec product_norm) {
    return ConvexSet(Epigraph{std::move(func), scalar_index, std::move(product_norm)});
  }
  /** The empty set, encoded as contradictory halfspaces. */
  static ConvexSet empty() {
    std::vector<ConvexSet> m;
    m.push_back(halfspace(Functional::unit(0), Rational(-1), true));
    m.push_back(halfspace(Functional::unit(0), Rational(1), false));
    return intersection(std::move(m));
  }

  const Node& node() const { return node_; }

  template <class T>
  const T* as() const {
    return std::get_if<T>(&node_);
  }

  std::vector<uint32_t> support() const {
    std::vector<uint32_t> s;
    collect_support_into(&s);
    return sorted_unique(std::move(s));
  }

  void collect_support_into(std::vector<uint32_t>* out) const;

 private:
  explicit ConvexSet(Node n) : node_(std::move(n)) {}
  Node node_;
};

inline void ConvexSet::collect_support_into(std::vector<uint32_t>* out) const {
  if (auto* h = as<Hyperplane>()) {
    collect_support(h->f, out);
  } else if (auto* h = as<Halfspace>()) {
    collect_support(h->f, out);
  } else if (auto* b = as<NormBall>()) {
    collect_support(b->center, out);
  } else if (auto* p = as<Polytope>()) {
    for (const auto& v : p->vertices) collect_support(v, out);
  } else if (auto* m = as<MinkowskiSum>()) {
    m->base->collect_support_into(out);
    collect_support(m->ball.center, out);
  } else if (auto* ix = as<Intersection>()) {
    for (const auto& mem : ix->members) mem->collect_support_into(out);
  } else if (auto* sl = as<SubspaceSlice>()) {
    for (const auto& [f, a] : sl->equalities) collect_support(f, out);
    sl->base->collect_support_into(out);
  } else if (auto* e = as<Epigraph>()) {
    for (const auto& [f, b] : e->func.pieces) collect_support(f, out);
    if (e->func.domain)
      for (const auto& v : *e->func.domain) collect_support(v, out);
    out->push_back(e->scalar_index);
  }
}

/** Positive scaling c*S. */
inline ConvexSet scaled(const ConvexSet& s, const Rational& c) {
  if (sgn(c) <= 0) throw SetError("scaled: factor must be positive");
  if (auto* h = s.as<ConvexSet::Hyperplane>())
    return ConvexSet::hyperplane(h->f, h->a * c);
  if (auto* h = s.as<ConvexSet::Halfspace>())
    return ConvexSet::halfspace(h->f, h->a * c, h->le);
  if (auto* b = s.as<ConvexSet::NormBall>())
    return ConvexSet::ball(b->center.scaled(c), b->radius * c, b->norm);
  if (auto* p = s.as<ConvexSet::Polytope>()) {
    std::vector<Vector> vs;
    for (const auto& v : p->vertices) vs.push_back(v.scaled(c));
    return ConvexSet::polytope(std::move(vs));
  }
  if (auto* m = s.as<ConvexSet::MinkowskiSum>())
    return ConvexSet::minkowski_sum(
        scaled(*m->base, c), ConvexSet::NormBall{m->ball.center.scaled(c),
                                                 m->ball.radius * c, m->ball.norm});
  if (auto* ix = s.as<ConvexSet::Intersection>()) {
    std::vector<ConvexSet> ms;
    for (const auto& mem : ix->members) ms.push_back(scaled(*mem, c));
    return ConvexSet::intersection(std::move(ms));
  }
  if (auto* sl = s.as<ConvexSet::SubspaceSlice>()) {
    std::vector<std::pair<Functional, Rational>> eqs;
    for (const auto& [f, a] : sl->equalities) eqs.emplace_back(f, a * c);
    return ConvexSet::subspace_slice(std::move(eqs), scaled(*sl->base, c));
  }
  throw SetError("scaled: unsupported set shape");
}

inline ConvexSet translated(const ConvexSet& s, const Vector& w) {
  if (auto* h = s.as<ConvexSet::Hyperplane>())
    return ConvexSet::hyperplane(h->f, h->a + pairing(h->f, w));
  if (auto* h = s.as<ConvexSet::Halfspace>())
    return ConvexSet::halfspace(h->f, h->a + pairing(h->f, w), h->le);
  if (auto* b = s.as<ConvexSet::NormBall>())
    return ConvexSet::ball(b->center.plus(w), b->radius, b->norm);
  if (auto* p = s.as<ConvexSet::Polytope>()) {
    std::vector<Vector> vs;
    for (const auto& v : p->vertices) vs.push_back(v.plus(w));
    return ConvexSet::polytope(std::move(vs));
  }
  if (auto* m = s.as<ConvexSet::MinkowskiSum>())
    return ConvexSet::minkowski_sum(
        translated(*m->base, w),
        ConvexSet::NormBall{m->ball.center.plus(w), m->ball.radius, m->ball.norm});
  if (auto* ix = s.as<ConvexSet::Intersection>()) {
    std::vector<ConvexSet> ms;
    for (const auto& mem : ix->members) ms.push_back(translated(*mem, w));
    return ConvexSet::intersection(std::move(ms));
  }
  if (auto* sl = s.as<ConvexSet::SubspaceSlice>()) {
    std::vector<std::pair<Functional, Rational>> eqs;
    for (const auto& [f, a] : sl->equalities) eqs.emplace_back(f, a + pairing(f, w));
    return ConvexSet::subspace_slice(std::move(eqs), translated(*sl->base, w));
  }
  throw SetError("translated: unsupported set shape");
}

namespace detail {

/** Coordinate binding for one point ranging over a set inside an LP. */
class CoordVars {
 public:
  CoordVars(lp::Problem& p, const std::vector<uint32_t>& indices) {
    for (uint32_t i : indices) vars_[i] = p.add_var();
  }
  AffExpr at(uint32_t i) const {
    auto it = vars_.find(i);
    if (it == vars_.end()) return AffExpr::of(Rational(0));
    return AffExpr::var(it->second);
  }
  std::function<AffExpr(uint32_t)> accessor() const {
    return [this](uint32_t i) { return at(i); };
  }
  const std::map<uint32_t, int>& vars() const { return vars_; }

 private:
  std::map<uint32_t, int> vars_;
};

inline AffExpr pair_expr(const Functional& f, const std::function<AffExpr(uint32_t)>& at) {
  AffExpr acc{{}, Rational(0)};
  for (const auto& [i, c] : f.entries()) {
    AffExpr e = at(i);
    acc.constant += c * e.constant;
    for (const auto& t : e.terms) acc.terms.push_back({t.var, c * t.coef});
  }
  return acc;
}

/** Emits LP rows stating that the point bound by `at` lies in `s`. */
inline void add_membership(lp::Problem& p, const ConvexSet& s,
                           const std::function<AffExpr(uint32_t)>& at,
                           const std::vector<uint32_t>& ambient) {
  if (auto* h = s.as<ConvexSet::Hyperplane>()) {
    append_eq(p, pair_expr(h->f, at), AffExpr::of(h->a));
    return;
  }
  if (auto* h = s.as<ConvexSet::Halfspace>()) {
    if (h->le)
      append_le(p, pair_expr(h->f, at), AffExpr::of(h->a));
    else
      append_le(p, AffExpr::of(h->a), pair_expr(h->f, at));
    return;
  }
  if (auto* b = s.as<ConvexSet::NormBall>()) {
    auto expr = [&](uint32_t i) {
      AffExpr e = at(i);
      e.constant -= b->center.at(i);
      return e;
    };
    append_norm_le(p, b->norm, expr, AffExpr::of(b->radius), ambient);
    return;
  }
  if (auto* poly = s.as<ConvexSet::Polytope>()) {
    std::vector<int> lam(poly->vertices.size());
    std::vector<lp::Term> sum;
    for (std::size_t j = 0; j < poly->vertices.size(); ++j) {
      lam[j] = p.add_var(true);
      sum.push_back({lam[j], Rational(1)});
    }
    p.add(std::move(sum), lp::Rel::Eq, Rational(1));
    for (uint32_t i : ambient) {
      AffExpr combo{{}, Rational(0)};
      for (std::size_t j = 0; j < poly->vertices.size(); ++j) {
        Rational c = poly->vertices[j].at(i);
        if (sgn(c) != 0) combo.terms.push_back({lam[j], c});
      }
      append_eq(p, at(i), combo);
    }
    return;
  }
  if (auto* m = s.as<ConvexSet::MinkowskiSum>()) {
    CoordVars base_pt(p, ambient);
    add_membership(p, *m->base, base_pt.accessor(), ambient);
    auto expr = [&](uint32_t i) {
      AffExpr e = at(i);
      AffExpr b = base_pt.at(i);
      for (const auto& t : b.terms) e.terms.push_back({t.var, -t.coef});
      e.constant -= b.constant + m->ball.center.at(i);
      return e;
    };
    append_norm_le(p, m->ball.norm, expr, AffExpr::of(m->ball.radius), ambient);
    return;
  }
  if (auto* ix = s.as<ConvexSet::Intersection>()) {
    for (const auto& mem : ix->members) add_membership(p, *mem, at, ambient);
    return;
  }
  if (auto* sl = s.as<ConvexSet::SubspaceSlice>()) {
    for (const auto& [f, a] : sl->equalities)
      append_eq(p, pair_expr(f, at), AffExpr::of(a));
    add_membership(p, *sl->base, at, ambient);
    return;
  }
  if (auto* e = s.as<ConvexSet::Epigraph>()) {
    AffExpr r = at(e->scalar_index);
    if (e->func.pieces.empty()) {
      append_le(p, AffExpr::of(Rational(0)), r);
    } else {
      for (const auto& [f, b] : e->func.pieces) {
        AffExpr lhs = pair_expr(f, at);
        lhs.constant += b;
        append_le(p, lhs, r);
      }
    }
    if (e->func.domain) {
      std::vector<uint32_t> part;
      for (uint32_t i : ambient)
        if (i != e->scalar_index) part.push_back(i);
      std::vector<int> lam(e->func.domain->size());
      std::vector<lp::Term> sum;
      for (std::size_t j = 0; j < lam.size(); ++j) {
        lam[j] = p.add_var(true);
        sum.push_back({lam[j], Rational(1)});
      }
      p.add(std::move(sum), lp::Rel::Eq, Rational(1));
      for (uint32_t i : part) {
        AffExpr combo{{}, Rational(0)};
        for (std::size_t j = 0; j < lam.size(); ++j) {
          Rational c = (*e->func.domain)[j].at(i);
          if (sgn(c) != 0) combo.terms.push_back({lam[j], c});
        }
        append_eq(p, at(i), combo);
      }
    }
    return;
  }
  throw SetError("add_membership: unsupported set shape");
}

inline std::vector<uint32_t> ambient_indices(const NormSpec& ambient,
                                             const ConvexSet& s,
                                             const std::vector<uint32_t>& extra = {}) {
  std::vector<uint32_t> e = s.support();
  e.insert(e.end(), extra.begin(), extra.end());
  return norm_index_closure(ambient, std::move(e));
}

inline bool euclidean(const NormSpec& n) {
  if (n.family() == NormSpec::Family::Ell2) return true;
  if (n.family() == NormSpec::Family::Product2) return euclidean(n.inner());
  return false;
}

/** Collects an H-description (rows over coordinates only); false if impossible. */
inline bool collect_h_rows(const ConvexSet& s, const std::vector<uint32_t>& e,
                           linalg::HRep* h) {
  auto dense = [&](const Functional& f) { return detail::to_dense(e, f); };
  if (auto* hp = s.as<ConvexSet::Hyperplane>()) {
    h->eq.push_back(dense(hp->f));
    h->c.push_back(hp->a);
    return true;
  }
  if (auto* hs = s.as<ConvexSet::Halfspace>()) {
    RatVec row = dense(hs->f);
    Rational rhs = hs->a;
    if (!hs->le) {
      for (auto& v : row) v = -v;
      rhs = -rhs;
    }
    h->a.push_back(std::move(row));
    h->b.push_back(std::move(rhs));
    return true;
  }
  if (auto* b = s.as<ConvexSet::NormBall>()) {
    if (!b->norm.polyhedral()) return false;
    for (const auto& g : ball_rows(b->norm, e)) {
      h->a.push_back(dense(g));
      h->b.push_back(b->radius + pairing(g, b->center));
    }
    return true;
  }
  if (auto* ix = s.as<ConvexSet::Intersection>()) {
    for (const auto& mem : ix->members)
      if (!collect_h_rows(*mem, e, h)) return false;
    return true;
  }
  if (auto* sl = s.as<ConvexSet::SubspaceSlice>()) {
    for (const auto& [f, a] : sl->equalities) {
      h->eq.push_back(dense(f));
      h->c.push_back(a);
    }
    return collect_h_rows(*sl->base, e, h);
  }
  if (auto* ep = s.as<ConvexSet::Epigraph>()) {
    if (ep->func.domain) return false;
    std::size_t scalar_pos = e.size();
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i] == ep->scalar_index) scalar_pos = i;
    if (scalar_pos == e.size()) return false;
    auto add_piece = [&](const Functional& f, const Rational& b) {
      RatVec row = dense(f);
      row[scalar_pos] -= 1;
      h->a.push_back(std::move(row));
      h->b.push_back(-b);
    };
    if (ep->func.pieces.empty()) {
      add_piece(Functional(), Rational(0));
    } else {
      for (const auto& [f, b] : ep->func.pieces) add_piece(f, b);
    }
    return true;
  }
  return false;
}

}  // namespace detail

/** Exact membership test. */
inline bool contains(const ConvexSet& s, const Vector& x) {
  if (auto* h = s.as<ConvexSet::Hyperplane>()) return pairing(h->f, x) == h->a;
  if (auto* h = s.as<ConvexSet::Halfspace>()) {
    int c = cmp(pairing(h->f, x), h->a);
    return h->le ? c <= 0 : c >= 0;
  }
  if (auto* b = s.as<ConvexSet::NormBall>())
    return norm_eval(b->norm, x.minus(b->center)) <= Scalar::exact(b->radius);
  if (auto* e = s.as<ConvexSet::Epigraph>()) {
    std::vector<Vector::Entry> part;
    for (const auto& en : x.entries())
      if (en.first != e->scalar_index) part.push_back(en);
    Vector xp(std::move(part));
    if (e->func.domain &&
        !contains(ConvexSet::polytope(*e->func.domain), xp))
      return false;
    Rational val(0);
    bool first = true;
    for (const auto& [f, b] : e->func.pieces) {
      Rational v = pairing(f, xp) + b;
      if (first || cmp(v, val) > 0) val = v;
      first = false;
    }
    if (e->func.pieces.empty()) val = 0;
    return cmp(val, x.at(e->scalar_index)) <= 0;
  }
  if (auto* ix = s.as<ConvexSet::Intersection>()) {
    for (const auto& mem : ix->members)
      if (!contains(*mem, x)) return false;
    return true;
  }
  if (auto* sl = s.as<ConvexSet::SubspaceSlice>()) {
    for (const auto& [f, a] : sl->equalities)
      if (pairing(f, x) != a) return false;
    return contains(*sl->base, x);
  }
  if (auto* m = s.as<ConvexSet::MinkowskiSum>()) {
    if (detail::euclidean(m->ball.norm)) {
      Scalar d = distance(x.minus(m->ball.center), *m->base, m->ball.norm);
      return d <= Scalar::exact(m->ball.radius);
    }
    // fall through to the LP route below
  }
  // polytope / Minkowski: LP feasibility with pinned coordinates
  std::vector<uint32_t> e = s.support();
  collect_support(x, &e);
  e = sorted_unique(std::move(e));
  lp::Problem p;
  detail::CoordVars pt(p, e);
  detail::add_membership(p, s, pt.accessor(), e);
  for (uint32_t i : e) append_eq(p, pt.at(i), AffExpr::of(x.at(i)));
  return lp::feasible(p);
}

inline bool is_empty_set(const ConvexSet& s) {
  std::vector<uint32_t> e = s.support();
  if (e.empty()) e.push_back(0);
  lp::Problem p;
  detail::CoordVars pt(p, e);
  detail::add_membership(p, s, pt.accessor(), e);
  return !lp::feasible(p);
}

/** Evaluates a PolyFunc at a point of its ground space. */
inline Scalar polyfunc_eval(const PolyFunc& f, const Vector& x) {
  if (f.domain && !contains(ConvexSet::polytope(*f.domain), x))
    return Scalar::pos_inf();
  if (f.pieces.empty()) return Scalar::exact(Rational(0));
  Rational best;
  bool first = true;
  for (const auto& [g, b] : f.pieces) {
    Rational v = pairing(g, x) + b;
    if (first || cmp(v, best) > 0) best = v;
    first = false;
  }
  return Scalar::exact(best);
}

namespace detail {

inline Scalar distance_l2(const Vector& x, const ConvexSet& s);

inline Rational sq_l2(const Vector& v) {
  Rational acc(0);
  for (const auto& [i, c] : v.entries()) acc += c * c;
  return acc;
}

inline Scalar distance_l2_points(const Vector& x, const std::vector<Vector>& pts,
                                 Vector* nearest = nullptr) {
  std::vector<uint32_t> e;
  collect_support(x, &e);
  for (const auto& v : pts) collect_support(v, &e);
  e = sorted_unique(std::move(e));
  RatMat dense;
  for (const auto& v : pts) dense.push_back(to_dense(e, v));
  auto r = minnorm::sq_distance_to_hull(to_dense(e, x), std::move(dense));
  if (nearest) *nearest = vector_from_dense(e, r.point);
  return Scalar::root_of(r.sq_dist);
}

inline Scalar distance_l2(const Vector& x, const ConvexSet& s) {
  if (contains(s, x)) return Scalar::exact(Rational(0));
  if (auto* h = s.as<ConvexSet::Hyperplane>()) {
    Rational num = pairing(h->f, x) - h->a;
    return Scalar::root_of(num * num / sq_l2(as_vector(h->f)));
  }
  if (auto* h = s.as<ConvexSet::Halfspace>()) {
    Rational num = pairing(h->f, x) - h->a;
    if (!h->le) num = -num;
    if (sgn(num) <= 0) return Scalar::exact(Rational(0));
    return Scalar::root_of(num * num / sq_l2(as_vector(h->f)));
  }
  if (auto* p = s.as<ConvexSet::Polytope>()) return distance_l2_points(x, p->vertices);
  if (auto* b = s.as<ConvexSet::NormBall>()) {
    if (euclidean(b->norm)) {
      Scalar d = Scalar::root_of(sq_l2(x.minus(b->center)));
      return scalar_max(Scalar::exact(Rational(0)), d - Scalar::exact(b->radius));
    }
    // polyhedral ball in a euclidean ambient: project onto its H-rows
  }
  if (auto* m = s.as<ConvexSet::MinkowskiSum>()) {
    if (euclidean(m->ball.norm)) {
      Scalar d = distance_l2(x.minus(m->ball.center), *m->base);
      return scalar_max(Scalar::exact(Rational(0)), d - Scalar::exact(m->ball.radius));
    }
  }
  if (auto* e = s.as<ConvexSet::Epigraph>()) {
    if (e->func.is_indicator()) {
      std::vector<Vector::Entry> part;
      for (const auto& en : x.entries())
        if (en.first != e->scalar_index) part.push_back(en);
      Vector xp(std::move(part));
      Scalar dx = distance_l2_points(xp, *e->func.domain);
      Rational r = x.at(e->scalar_index);
      Rational below = sgn(r) < 0 ? r * r : Rational(0);
      return Scalar::root_of(dx.square() + below);
    }
  }
  // generic H-region projection
  std::vector<uint32_t> e = s.support();
  collect_support(x, &e);
  e = sorted_unique(std::move(e));
  linalg::HRep h;
  if (!collect_h_rows(s, e, &h))
    throw SetError("exact l2 distance unsupported for this set shape");
  auto proj = minnorm::project_onto_region(to_dense(e, x), h);
  if (!proj) return Scalar::pos_inf();
  return Scalar::root_of(proj->sq_dist);
}

}  // namespace detail

/**
 * d(x, C) = inf{ ||x - a|| : a in C }, computed by exact LP for polyhedral
 * ambient norms and by exact Euclidean projection otherwise. Infinite for
 * empty C (the standing convention).
 */
inline Scalar distance(const Vector& x, const ConvexSet& c, const NormSpec& ambient) {
  if (detail::euclidean(ambient)) return detail::distance_l2(x, c);
  if (!ambient.polyhedral())
    throw NormError("distance: ambient norm must be polyhedral or euclidean");
  std::vector<uint32_t> e = detail::ambient_indices(ambient, c, x.support());
  lp::Problem p;
  detail::CoordVars pt(p, e);
  detail::add_membership(p, c, pt.accessor(), e);
  int t = p.add_var(true);
  auto expr = [&](uint32_t i) {
    AffExpr a = pt.at(i);
    a.constant -= x.at(i);
    return a;
  };
  append_norm_le(p, ambient, expr, AffExpr::var(t), e);
  p.minimize({{t, Rational(1)}});
  auto res = lp::solve(p);
  if (res.status == lp::Status::Infeasible) return Scalar::pos_inf();
  if (res.status != lp::Status::Optimal) throw LpError("distance program failed");
  return Scalar::exact(res.value);
}

/**
 * Nearest point of C to x. For polyhedral ambient norms ties are broken by
 * lexicographically smallest coordinates, which makes selections canonical.
 */
inline Vector nearest_point(const Vector& x, const ConvexSet& c, const NormSpec& ambient) {
  if (detail::euclidean(ambient)) {
    if (contains(c, x)) return x;
    if (auto* p = c.as<ConvexSet::Polytope>()) {
      Vector nearest;
      detail::distance_l2_points(x, p->vertices, &nearest);
      return nearest;
    }
    std::vector<uint32_t> e = c.support();
    collect_support(x, &e);
    e = sorted_unique(std::move(e));
    linalg::HRep h;
    if (detail::collect_h_rows(c, e, &h)) {
      auto proj = minnorm::project_onto_region(detail::to_dense(e, x), h);
      if (!proj) throw SetError("nearest_point: empty set");
      return detail::vector_from_dense(e, proj->point);
    }
    throw SetError("nearest_point: unsupported euclidean instance");
  }
  std::vector<uint32_t> e = detail::ambient_indices(ambient, c, x.support());
  std::vector<std::pair<uint32_t, Rational>> pinned;
  std::optional<Rational> best_t;
  auto solve_stage = [&](std::optional<uint32_t> coord) -> Rational {
    lp::Problem p;
    detail::CoordVars pt(p, e);
    detail::add_membership(p, c, pt.accessor(), e);
    int t = p.add_var(true);
    auto expr = [&](uint32_t i) {
      AffExpr a = pt.at(i);
      a.constant -= x.at(i);
      return a;
    };
    append_norm_le(p, ambient, expr, AffExpr::var(t), e);
    for (const auto& [idx, val] : pinned) append_eq(p, pt.at(idx), AffExpr::of(val));
    if (best_t) p.add({{t, Rational(1)}}, lp::Rel::Le, *best_t);
    int obj_var = coord ? pt.vars().at(*coord) : t;
    p.minimize({{obj_var, Rational(1)}});
    auto res = lp::solve(p);
    if (res.status != lp::Status::Optimal)
      throw SetError("nearest_point: program not optimal (empty set?)");
    return res.x[obj_var];
  };
  best_t = solve_stage(std::nullopt);
  for (uint32_t i : e) pinned.emplace_back(i, solve_stage(i));
  std::vector<Vector::Entry> ent;
  for (const auto& [idx, val] : pinned)
    if (sgn(val) != 0) ent.emplace_back(idx, val);
  return Vector(std::move(ent));
}

/** gap d(A, B) = inf ||a - b||; infinite when either set is empty. */
inline Scalar gap(const ConvexSet& a, const ConvexSet& b, const NormSpec& ambient) {
  if (detail::euclidean(ambient)) {
    // generator route: difference-of-vertices hull (epigraphs truncated)
    auto vertices_of = [&](const ConvexSet& s) -> std::optional<std::vector<Vector>> {
      if (auto* p = s.as<ConvexSet::Polytope>()) return p->vertices;
      return std::nullopt;
    };
    auto av = vertices_of(a);
    auto bv = vertices_of(b);
    auto epi_prism = [&](const ConvexSet& s,
                         const std::vector<Vector>& other) -> std::optional<std::vector<Vector>> {
      auto* e = s.as<ConvexSet::Epigraph>();
      if (!e || !e->func.is_indicator()) return std::nullopt;
      Rational top(0);
      for (const auto& v : other) {
        Rational r = v.at(e->scalar_index);
        if (cmp(r, top) > 0) top = r;
      }
      std::vector<Vector> pts;
      for (const auto& v : *e->func.domain) {
        pts.push_back(v);  // scalar coordinate 0
        std::vector<Vector::Entry> ent(v.entries().begin(), v.entries().end());
        if (sgn(top) != 0) ent.emplace_back(e->scalar_index, top);
        pts.push_back(Vector(std::move(ent)));
      }
      return pts;
    };
    if (!av && bv) av = epi_prism(a, *bv);
    if (!bv && av) bv = epi_prism(b, *av);
    if (av && bv) {
      if (av->empty() || bv->empty()) return Scalar::pos_inf();
      std::vector<uint32_t> e;
      for (const auto& v : *av) collect_support(v, &e);
      for (const auto& v : *bv) collect_support(v, &e);
      e = sorted_unique(std::move(e));
      RatMat diffs;
      for (const auto& va : *av)
        for (const auto& vb : *bv) diffs.push_back(detail::to_dense(e, va.minus(vb)));
      auto r = minnorm::min_norm_point(diffs);
      return Scalar::root_of(r.sq_dist);
    }
    throw SetError("exact l2 gap unsupported for this pair of set shapes");
  }
  if (!ambient.polyhedral())
    throw NormError("gap: ambient norm must be polyhedral or euclidean");
  std::vector<uint32_t> e = a.support();
  for (uint32_t i : b.support()) e.push_back(i);
  e = norm_index_closure(ambient, std::move(e));
  lp::Problem p;
  detail::CoordVars pa(p, e);
  detail::CoordVars pb(p, e);
  detail::add_membership(p, a, pa.accessor(), e);
  detail::add_membership(p, b, pb.accessor(), e);
  int t = p.add_var(true);
  auto expr = [&](uint32_t i) {
    AffExpr d = pa.at(i);
    AffExpr bb = pb.at(i);
    for (const auto& term : bb.terms) d.terms.push_back({term.var, -term.coef});
    d.constant -= bb.constant;
    return d;
  };
  append_norm_le(p, ambient, expr, AffExpr::var(t), e);
  p.minimize({{t, Rational(1)}});
  auto res = lp::solve(p);
  if (res.status == lp::Status::Infeasible) return Scalar::pos_inf();
  if (res.status != lp::Status::Optimal) throw LpError("gap program failed");
  return Scalar::exact(res.value);
}

/** sup{<f, c> : c in C}; +inf if unbounded above, -inf if C is empty. */
inline Scalar support_value(const Functional& f, const ConvexSet& c) {
  std::vector<uint32_t> e = c.support();
  collect_support(f, &e);
  e = sorted_unique(std::move(e));
  lp::Problem p;
  detail::CoordVars pt(p, e);
  detail::add_membership(p, c, pt.accessor(), e);
  std::vector<lp::Term> obj;
  for (const auto& [i, coef] : f.entries()) {
    AffExpr a = pt.at(i);
    for (const auto& t : a.terms) obj.push_back({t.var, coef * t.coef});
  }
  p.maximize(std::move(obj));
  auto res = lp::solve(p);
  switch (res.status) {
    case lp::Status::Optimal:
      return Scalar::exact(res.value);
    case lp::Status::Unbounded:
      return Scalar::pos_inf();
    case lp::Status::Infeasible:
      return Scalar::neg_inf();
  }
  throw LpError("support program failed");
}

struct Generators {
  std::vector<Vector> points;
  std::vector<Vector> rays;
};

/**
 * Point/ray description of a polyhedral set over the given ambient
 * coordinates; cylinder directions for indices the set does not constrain
 * are made explicit.
 */
inline Generators generators(const ConvexSet& s, std::vector<uint32_t> ambient) {
  ambient = sorted_unique(std::move(ambient));
  Generators g;
  auto cylinder_rays = [&](const std::vector<uint32_t>& constrained) {
    for (uint32_t i : ambient) {
      bool c = false;
      for (uint32_t j : constrained)
        if (i == j) c = true;
      if (!c) {
        g.rays.push_back(Vector::unit(i));
        g.rays.push_back(Vector::unit(i).negated());
      }
    }
  };
  if (auto* p = s.as<ConvexSet::Polytope>()) {
    g.points = p->vertices;
    return g;
  }
  if (auto* h = s.as<ConvexSet::Hyperplane>()) {
    std::vector<uint32_t> e = h->f.support();
    Rational sq = detail::sq_l2(as_vector(h->f));
    g.points.push_back(as_vector(h->f).scaled(h->a / sq));
    RatMat sys{detail::to_dense(e, h->f)};
    for (const auto& k : linalg::kernel_basis(sys)) {
      g.rays.push_back(detail::vector_from_dense(e, k));
      g.rays.push_back(detail::vector_from_dense(e, k).negated());
    }
    cylinder_rays(e);
    return g;
  }
  if (auto* h = s.as<ConvexSet::Halfspace>()) {
    std::vector<uint32_t> e = h->f.support();
    Rational sq = detail::sq_l2(as_vector(h->f));
    g.points.push_back(as_vector(h->f).scaled(h->a / sq));
    RatMat sys{detail::to_dense(e, h->f)};
    for (const auto& k : linalg::kernel_basis(sys)) {
      g.rays.push_back(detail::vector_from_dense(e, k));
      g.rays.push_back(detail::vector_from_dense(e, k).negated());
    }
    g.rays.push_back(h->le ? as_vector(h->f).negated() : as_vector(h->f));
    cylinder_rays(e);
    return g;
  }
  if (auto* b = s.as<ConvexSet::NormBall>()) {
    if (!b->norm.polyhedral()) throw SetError("generators: non-polyhedral ball");
    for (const auto& v : ball_vertices(b->norm, ambient))
      g.points.push_back(b->center.plus(v.scaled(b->radius)));
    if (sgn(b->radius) == 0) g.points.push_back(b->center);
    return g;
  }
  if (auto* m = s.as<ConvexSet::MinkowskiSum>()) {
    Generators base = generators(*m->base, ambient);
    ConvexSet ball = ConvexSet::ball(m->ball.center, m->ball.radius, m->ball.norm);
    Generators bg = generators(ball, ambient);
    for (const auto& p : base.points)
      for (const auto& q : bg.points) g.points.push_back(p.plus(q));
    g.rays = base.rays;
    return g;
  }
  if (auto* e = s.as<ConvexSet::Epigraph>()) {
    if (e->func.is_indicator()) {
      for (const auto& v : *e->func.domain) g.points.push_back(v);
      g.rays.push_back(Vector::unit(e->scalar_index));
      return g;
    }
    // H-form epigraph: enumerate vertices and rays
  }
  // H-form fallback (intersections, slices, unbounded-domain epigraphs)
  {
    linalg::HRep h;
    if (detail::collect_h_rows(s, ambient, &h)) {
      if (h.a.empty()) {
        // pure affine subspace
        auto x0 = linalg::solve(h.eq, h.c);
        if (!x0) return g;  // empty
        g.points.push_back(detail::vector_from_dense(ambient, *x0));
        for (const auto& k : linalg::kernel_basis(h.eq)) {
          g.rays.push_back(detail::vector_from_dense(ambient, k));
          g.rays.push_back(detail::vector_from_dense(ambient, k).negated());
        }
        return g;
      }
      for (const auto& v : linalg::enumerate_vertices(h))
        g.points.push_back(detail::vector_from_dense(ambient, v));
      for (const auto& r : linalg::enumerate_extreme_rays(h))
        g.rays.push_back(detail::vector_from_dense(ambient, r));
      if (g.points.empty() && !is_empty_set(s))
        throw SetError("generators: H-form set has no vertices (not pointed)");
      return g;
    }
  }
  throw SetError("generators: unsupported set shape");
}

struct Separation {
  Functional lambda;
  Rational sup_a;
  Rational inf_b;
  Rational margin;
};

/**
 * Maximum-margin separating functional with unit dual norm:
 * sup_A lambda = sup_a < inf_b = inf_B lambda and inf_b - sup_a = gap(A, B),
 * exact by LP duality.
 */
inline Separation separate(const ConvexSet& a, const ConvexSet& b,
                           const NormSpec& ambient) {
  if (!ambient.polyhedral())
    throw NormError("separate: ambient norm must be polyhedral");
  std::vector<uint32_t> e = a.support();
  for (uint32_t i : b.support()) e.push_back(i);
  e = norm_index_closure(ambient, std::move(e));
  Generators ga = generators(a, e);
  Generators gb = generators(b, e);
  if (ga.points.empty() || gb.points.empty())
    throw SeparationError("separate: empty set");
  lp::Problem p;
  std::map<uint32_t, int> lam;
  for (uint32_t i : e) lam[i] = p.add_var();
  int alpha = p.add_var();
  int beta = p.add_var();
  auto pair_terms = [&](const Vector& v) {
    std::vector<lp::Term> terms;
    for (const auto& [i, c] : v.entries()) terms.push_back({lam[i], c});
    return terms;
  };
  for (const auto& q : ga.points) {
    auto terms = pair_terms(q);
    terms.push_back({alpha, Rational(-1)});
    p.add(std::move(terms), lp::Rel::Le, Rational(0));
  }
  for (const auto& r : ga.rays) p.add(pair_terms(r), lp::Rel::Le, Rational(0));
  for (const auto& q : gb.points) {
    auto terms = pair_terms(q);
    terms.push_back({beta, Rational(-1)});
    p.add(std::move(terms), lp::Rel::Ge, Rational(0));
  }
  for (const auto& r : gb.rays) p.add(pair_terms(r), lp::Rel::Ge, Rational(0));
  for (const auto& bv : ball_vertices(ambient, e)) p.add(pair_terms(bv), lp::Rel::Le, Rational(1));
  p.maximize({{beta, Rational(1)}, {alpha, Rational(-1)}});
  auto res = lp::solve(p);
  if (res.status != lp::Status::Optimal)
    throw SeparationError("separate: separation program failed");
  if (sgn(res.value) <= 0)
    throw SeparationError("separate: sets are not strictly separated (gap 0)");
  std::vector<Functional::Entry> ent;
  for (uint32_t i : e) {
    Rational v = res.x[lam[i]];
    if (sgn(v) != 0) ent.emplace_back(i, v);
  }
  Separation out;
  out.lambda = Functional(std::move(ent));
  Scalar sup_a = support_value(out.lambda, a);
  Scalar inf_b = -support_value(out.lambda.negated(), b);
  if (!sup_a.is_rational() || !inf_b.is_rational())
    throw SeparationError("separate: unexpected unbounded support values");
  out.sup_a = sup_a.rational();
  out.inf_b = inf_b.rational();
  out.margin = out.inf_b - out.sup_a;
  if (cmp(out.margin, res.value) != 0)
    throw SeparationError("separate: margin mismatch against LP value");
  if (dual_norm_eval(ambient, out.lambda) != Scalar::exact(Rational(1)))
    throw SeparationError("separate: functional is not unit dual norm");
  return out;
}

namespace detail {

inline Rational rational_approx(double v, long den_bits = 40) {
  double scale = std::ldexp(1.0, static_cast<int>(den_bits));
  double scaled = v * scale;
  mpz_class num;
  mpz_set_d(num.get_mpz_t(), scaled >= 0 ? scaled + 0.5 : scaled - 0.5);
  Rational q(num, mpz_class(1) << den_bits);
  q.canonicalize();
  return q;
}

}  // namespace detail

/**
 * A subgradient of d(., C) at x: zero inside C, otherwise a unit-dual-norm
 * functional whose affine minorant is tight at x. The euclidean branch
 * returns a rational approximation of the gradient (flagged by nature of the
 * norm; error below 1e-10 on unit data).
 */
inline Functional distance_subgradient(const Vector& x, const ConvexSet& c,
                                       const NormSpec& ambient) {
  if (contains(c, x)) return Functional();
  if (detail::euclidean(ambient)) {
    Vector p = nearest_point(x, c, ambient);
    Vector gdir = x.minus(p);
    double len = std::sqrt(detail::sq_l2(gdir).get_d());
    std::vector<Functional::Entry> ent;
    for (const auto& [i, v] : gdir.entries())
      ent.emplace_back(i, detail::rational_approx(v.get_d() / len));
    return Functional(std::move(ent));
  }
  Separation sep = separate(c, ConvexSet::singleton(x), ambient);
  return sep.lambda;
}

/** Epigraph of f as a convex set in the product window (one extra scalar slot). */
inline ConvexSet epigraph_build(const PolyFunc& f, const NormSpec& inner) {
  std::vector<uint32_t> e;
  for (const auto& [g, b] : f.pieces) collect_support(g, &e);
  if (f.domain)
    for (const auto& v : *f.domain) collect_support(v, &e);
  e = sorted_unique(std::move(e));
  uint32_t scalar_index = e.empty() ? 0 : e.back() + 1;
  return ConvexSet::epigraph(f, scalar_index, NormSpec::product2(inner, scalar_index));
}

/**
 * For each radius R, min{ f(x)/||x|| : ||x|| = R, x in dom f }, evaluated
 * facet by facet over the polyhedral sphere. +inf when the sphere misses the
 * domain (infimum over the empty set).
 */
inline std::vector<Scalar> coercivity_margin(const PolyFunc& f,
                                             const std::vector<Rational>& radii,
                                             const NormSpec& ambient) {
  if (!ambient.polyhedral())
    throw NormError("coercivity_margin: ambient norm must be polyhedral");
  std::vector<uint32_t> e;
  for (const auto& [g, b] : f.pieces) collect_support(g, &e);
  if (f.domain)
    for (const auto& v : *f.domain) collect_support(v, &e);
  if (e.empty()) e.push_back(0);
  e = norm_index_closure(ambient, sorted_unique(std::move(e)));
  auto rows = ball_rows(ambient, e);
  std::vector<Scalar> out;
  for (const Rational& radius : radii) {
    if (sgn(radius) <= 0) throw SetError("coercivity_margin: radius must be positive");
    std::optional<Rational> best;
    for (const auto& facet : rows) {
      lp::Problem p;
      detail::CoordVars pt(p, e);
      int z = p.add_var();
      append_eq(p, detail::pair_expr(facet, pt.accessor()), AffExpr::of(radius));
      for (const auto& other : rows)
        append_le(p, detail::pair_expr(other, pt.accessor()), AffExpr::of(radius));
      if (f.pieces.empty()) {
        append_le(p, AffExpr::of(Rational(0)), AffExpr::var(z));
      } else {
        for (const auto& [g, b] : f.pieces) {
          AffExpr lhs = detail::pair_expr(g, pt.accessor());
          lhs.constant += b;
          append_le(p, lhs, AffExpr::var(z));
        }
      }
      if (f.domain) {
        std::vector<int> lamv(f.domain->size());
        std::vector<lp::Term> sum;
        for (std::size_t j = 0; j < lamv.size(); ++j) {
          lamv[j] = p.add_var(true);
          sum.push_back({lamv[j], Rational(1)});
        }
        p.add(std::move(sum), lp::Rel::Eq, Rational(1));
        for (uint32_t i : e) {
          AffExpr combo{{}, Rational(0)};
          for (std::size_t j = 0; j < lamv.size(); ++j) {
            Rational cc = (*f.domain)[j].at(i);
            if (sgn(cc) != 0) combo.terms.push_back({lamv[j], cc});
          }
          append_eq(p, pt.at(i), combo);
        }
      }
      p.minimize({{z, Rational(1)}});
      auto res = lp::solve(p);
      if (res.status == lp::Status::Infeasible) continue;
      if (res.status != lp::Status::Optimal)
        throw LpError("coercivity facet program failed");
      Rational margin = res.value / radius;
      if (!best || cmp(margin, *best) < 0) best = margin;
    }
    out.push_back(best ? Scalar::exact(*best) : Scalar::pos_inf());
  }
  return out;
}

/** Family of polytopes standing in for weakly compact test sets. */
struct CompactFamily {
  std::vector<ConvexSet> members;

  static CompactFamily of(std::vector<ConvexSet> polytopes) {
    for (const auto& m : polytopes)
      if (!m.as<ConvexSet::Polytope>())
        throw SetError("CompactFamily members must be polytopes");
    return CompactFamily{std::move(polytopes)};
  }
};

}  // namespace convlab
