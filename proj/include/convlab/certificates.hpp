#pragma once

#include <functional>
#include <string>
#include <vector>

#include "convlab/convergence.hpp"

namespace convlab {

/**
 * Certificate data for the Attouch-Beer sufficient conditions: a unit
 * functional attaining its supremum on the limit set, plus a sequence of
 * functionals in the dual ball converging to it in the declared mode with
 * the limsup support-value condition.
 */
struct SliceCertificate {
  enum class Mode { NormConvergence, MackeyConvergence, WStarConvergence };

  Functional x0_star;
  Vector attain_point;
  std::function<Functional(long)> cert_seq;
  Mode mode;
  CompactFamily mackey_family;       // MackeyConvergence mode
  std::vector<Vector> wstar_points;  // WStarConvergence mode
};

namespace detail {

inline void check_certificate_invariants(const SliceCertificate& cert,
                                         const SetSequence& seq) {
  if (dual_norm_eval(seq.ambient, cert.x0_star) != Scalar::exact(Rational(1)))
    throw CertificateError("certificate functional is not unit dual norm");
  if (!contains(seq.limit, cert.attain_point))
    throw CertificateError("attain point is not a member of the limit set");
  Scalar sup = support_value(cert.x0_star, seq.limit);
  if (!sup.is_rational() ||
      cmp(sup.rational(), pairing(cert.x0_star, cert.attain_point)) != 0)
    throw CertificateError("certificate functional does not attain its supremum "
                           "at the attain point");
  for (long n = seq.start; n <= seq.horizon; ++n) {
    if (dual_norm_eval(seq.ambient, cert.cert_seq(n)) > Scalar::exact(Rational(1)))
      throw CertificateError("certificate sequence leaves the dual ball at n = " +
                             std::to_string(n));
  }
}

/** Condition (i): distances from sampled limit-set points vanish. */
inline void check_condition_i(const SliceCertificate& cert, const SetSequence& seq,
                              const Rational& tol, ConvergenceVerdict* v) {
  std::vector<Vector> samples{cert.attain_point};
  try {
    Generators g = generators(seq.limit, seq.limit.support());
    for (const auto& p : g.points) {
      if (samples.size() >= 7) break;
      bool dup = false;
      for (const auto& s : samples)
        if (s == p) dup = true;
      if (!dup) samples.push_back(p);
    }
  } catch (const SetError&) {
    // sets without a generator description are sampled at the attain point only
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::string id = "cond_i[" + std::to_string(i) + "]";
    auto values = parallel_map_range<Scalar>(seq.start, seq.horizon + 1, [&](long n) {
      return distance(samples[i], seq.generator(n), seq.ambient);
    });
    std::vector<TraceEntry> trace;
    for (long n = seq.start; n <= seq.horizon; ++n)
      trace.push_back({n, values[n - seq.start]});
    for (const auto& e : trace) v->trace.push_back({id, e.n, e.value});
    auto d = tail_decide(trace, tol);
    if (!d.exact) v->exact = false;
    v->max_tail_deviation = scalar_max(v->max_tail_deviation, d.max_tail_deviation);
    if (!d.supported && v->supported) {
      v->supported = false;
      std::size_t pos = d.witness_pos.value_or(trace.size() - 1);
      v->witness = Witness{id, trace[pos].n, trace[pos].value, Scalar::exact(Rational(0))};
      v->notes.push_back("condition (i) fails: " + d.rule);
    }
  }
}

/** The limsup condition: sup_{C_n} cert(n) must not exceed sup_C x0* in the limit. */
inline void check_limsup(const SliceCertificate& cert, const SetSequence& seq,
                         const Rational& tol, ConvergenceVerdict* v) {
  Scalar bound = support_value(cert.x0_star, seq.limit);
  auto values = parallel_map_range<Scalar>(seq.start, seq.horizon + 1, [&](long n) {
    return support_value(cert.cert_seq(n), seq.generator(n));
  });
  std::vector<TraceEntry> trace;
  for (long n = seq.start; n <= seq.horizon; ++n)
    trace.push_back({n, values[n - seq.start]});
  for (const auto& e : trace) v->trace.push_back({"limsupSup", e.n, e.value});
  auto d = tail_decide(excess_over(trace, bound), tol);
  if (!d.exact) v->exact = false;
  v->max_tail_deviation = scalar_max(v->max_tail_deviation, d.max_tail_deviation);
  if (!d.supported && v->supported) {
    v->supported = false;
    std::size_t pos = d.witness_pos.value_or(trace.size() - 1);
    v->witness = Witness{"limsupSup", trace[pos].n, trace[pos].value, bound};
    v->notes.push_back("limsup condition fails: " + d.rule);
  }
}

inline void check_mode(const SliceCertificate& cert, const SetSequence& seq,
                       const Rational& tol, ConvergenceVerdict* v) {
  switch (cert.mode) {
    case SliceCertificate::Mode::NormConvergence: {
      auto values = parallel_map_range<Scalar>(seq.start, seq.horizon + 1, [&](long n) {
        return dual_norm_eval(seq.ambient, cert.cert_seq(n).minus(cert.x0_star));
      });
      std::vector<TraceEntry> trace;
      for (long n = seq.start; n <= seq.horizon; ++n)
        trace.push_back({n, values[n - seq.start]});
      for (const auto& e : trace) v->trace.push_back({"normMode", e.n, e.value});
      auto d = tail_decide(trace, tol);
      if (!d.exact) v->exact = false;
      if (!d.supported && v->supported) {
        v->supported = false;
        std::size_t pos = d.witness_pos.value_or(trace.size() - 1);
        v->witness = Witness{"normMode", trace[pos].n, trace[pos].value,
                             Scalar::exact(Rational(0))};
        v->notes.push_back("norm-convergence mode fails: " + d.rule);
      }
      return;
    }
    case SliceCertificate::Mode::MackeyConvergence: {
      if (cert.mackey_family.members.empty())
        throw CertificateError("mackey mode requires a compact family");
      for (std::size_t k = 0; k < cert.mackey_family.members.size(); ++k) {
        const auto* poly = cert.mackey_family.members[k].as<ConvexSet::Polytope>();
        std::vector<TraceEntry> trace;
        for (long n = seq.start; n <= seq.horizon; ++n) {
          Functional diff = cert.cert_seq(n).minus(cert.x0_star);
          Rational best(0);
          for (const auto& vert : poly->vertices) {
            Rational val = abs(pairing(diff, vert));
            if (cmp(val, best) > 0) best = val;
          }
          trace.push_back({n, Scalar::exact(best)});
        }
        std::string id = "mackeyMode:K[" + std::to_string(k) + "]";
        for (const auto& e : trace) v->trace.push_back({id, e.n, e.value});
        auto d = tail_decide(trace, tol);
        if (!d.supported && v->supported) {
          v->supported = false;
          std::size_t pos = d.witness_pos.value_or(trace.size() - 1);
          v->witness =
              Witness{id, trace[pos].n, trace[pos].value, Scalar::exact(Rational(0))};
          v->notes.push_back("mackey-convergence mode fails: " + d.rule);
        }
      }
      return;
    }
    case SliceCertificate::Mode::WStarConvergence: {
      if (cert.wstar_points.empty())
        throw CertificateError("w*-mode requires probe points");
      for (std::size_t k = 0; k < cert.wstar_points.size(); ++k) {
        std::vector<TraceEntry> trace;
        for (long n = seq.start; n <= seq.horizon; ++n)
          trace.push_back(
              {n, Scalar::exact(pairing(cert.cert_seq(n), cert.wstar_points[k]))});
        Scalar limit = Scalar::exact(pairing(cert.x0_star, cert.wstar_points[k]));
        std::string id = "wstarMode[" + std::to_string(k) + "]";
        for (const auto& e : trace) v->trace.push_back({id, e.n, e.value});
        auto d = tail_decide(deviations_from(trace, limit), tol);
        if (!d.supported && v->supported) {
          v->supported = false;
          std::size_t pos = d.witness_pos.value_or(trace.size() - 1);
          v->witness = Witness{id, trace[pos].n, trace[pos].value, limit};
          v->notes.push_back("w*-convergence mode fails: " + d.rule);
        }
      }
      return;
    }
  }
}

}  // namespace detail

/**
 * Verifies the two sufficient conditions of the certificate against the
 * sequence: condition (i) plus the limsup condition, plus the mode's own
 * convergence. Norm mode certifies slice convergence, Mackey mode certifies
 * weak compact gap convergence.
 */
inline ConvergenceVerdict verify_certificate(const SliceCertificate& cert,
                                             const SetSequence& seq, const Rational& tol) {
  if (cert.mode == SliceCertificate::Mode::WStarConvergence)
    throw CertificateError("w*-mode certificates verify with verify_wijsman_certificate");
  detail::check_certificate_invariants(cert, seq);
  ConvergenceVerdict v;
  v.notion = cert.mode == SliceCertificate::Mode::NormConvergence ? Notion::Slice
                                                                  : Notion::WeakCompactGap;
  v.horizon = seq.horizon;
  v.tolerance = tol;
  v.supported = true;
  v.max_tail_deviation = Scalar::exact(Rational(0));
  detail::check_condition_i(cert, seq, tol, &v);
  detail::check_limsup(cert, seq, tol, &v);
  detail::check_mode(cert, seq, tol, &v);
  return v;
}

/**
 * The Wijsman characterization: recovery points realize condition (i) with
 * norm convergence, and a w*-convergent certificate realizes (ii).
 */
inline ConvergenceVerdict verify_wijsman_certificate(
    const SliceCertificate& cert, const SetSequence& seq,
    const std::function<Vector(long)>& recovery, const Rational& tol) {
  if (cert.mode != SliceCertificate::Mode::WStarConvergence)
    throw CertificateError("verify_wijsman_certificate expects a w*-mode certificate");
  detail::check_certificate_invariants(cert, seq);
  ConvergenceVerdict v;
  v.notion = Notion::Wijsman;
  v.horizon = seq.horizon;
  v.tolerance = tol;
  v.supported = true;
  v.max_tail_deviation = Scalar::exact(Rational(0));
  const Scalar tol_s = Scalar::exact(tol);
  // recovery points must belong to their sets (within membership tolerance)
  for (long n = seq.start; n <= seq.horizon; ++n) {
    Scalar memb = distance(recovery(n), seq.generator(n), seq.ambient);
    if (memb > tol_s)
      throw CertificateError("recovery point not in its set at n = " + std::to_string(n) +
                             " (membership tolerance exceeded: " + memb.str() + ")");
  }
  {
    std::vector<TraceEntry> trace;
    for (long n = seq.start; n <= seq.horizon; ++n)
      trace.push_back({n, norm_eval(seq.ambient, recovery(n).minus(cert.attain_point))});
    for (const auto& e : trace) v.trace.push_back({"recovery", e.n, e.value});
    auto d = tail_decide(trace, tol);
    if (!d.exact) v.exact = false;
    v.max_tail_deviation = scalar_max(v.max_tail_deviation, d.max_tail_deviation);
    if (!d.supported) {
      v.supported = false;
      std::size_t pos = d.witness_pos.value_or(trace.size() - 1);
      v.witness = Witness{"recovery", trace[pos].n, trace[pos].value,
                          Scalar::exact(Rational(0))};
      v.notes.push_back("condition (i) fails: recovery points do not converge (" + d.rule +
                        ")");
    }
  }
  detail::check_limsup(cert, seq, tol, &v);
  detail::check_mode(cert, seq, tol, &v);
  return v;
}

/**
 * One cell of the hyperplane-exhaustion construction: a compact section K_n
 * inside the level hyperplane against a member C_j of the sequence, with the
 * gap pattern 1 - 1/n < d(K_n, C_j) < 1 + 1/n.
 */
struct SeparationInstance {
  long n;
  long j;
  ConvexSet kn;  // polytope
  ConvexSet cj;
  NormSpec ambient;
};

/**
 * Produces the unit separating functional between (1 - 1/n) B and K_n - C_j
 * in one joint program, and verifies the resulting inequality
 * sup_{C_j} Lam + (1 - 1/n) <= min_{K_n} Lam exactly.
 */
inline Functional construct_separating_sequence(const SeparationInstance& inst) {
  if (inst.n < 2) throw CertificateError("separation instance needs n >= 2");
  if (!inst.kn.as<ConvexSet::Polytope>())
    throw CertificateError("separation instance: K_n must be a polytope");
  Rational r = Rational(1) - Rational(1, inst.n);
  Scalar g = gap(inst.kn, inst.cj, inst.ambient);
  if (!g.is_rational())
    throw CertificateError("separation instance: gap is not finite rational");
  Rational lo = r, hi = Rational(1) + Rational(1, inst.n);
  if (!(cmp(lo, g.rational()) < 0 && cmp(g.rational(), hi) < 0))
    throw CertificateError("gap pattern violated: need 1 - 1/n < d(K_n, C_j) < 1 + 1/n, got " +
                           format_rational(g.rational()));
  std::vector<uint32_t> e = inst.kn.support();
  for (uint32_t i : inst.cj.support()) e.push_back(i);
  e = norm_index_closure(inst.ambient, std::move(e));
  Generators gk = generators(inst.kn, e);
  Generators gc = generators(inst.cj, e);
  if (gk.points.empty() || gc.points.empty())
    throw CertificateError("separation instance: empty set");
  // one joint program over the Minkowski difference K_n - C_j
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
  for (const auto& bv : ball_vertices(inst.ambient, e)) {
    auto terms = pair_terms(bv.scaled(r));
    terms.push_back({alpha, Rational(-1)});
    p.add(std::move(terms), lp::Rel::Le, Rational(0));
  }
  for (const auto& kp : gk.points)
    for (const auto& cp : gc.points) {
      auto terms = pair_terms(kp.minus(cp));
      terms.push_back({beta, Rational(-1)});
      p.add(std::move(terms), lp::Rel::Ge, Rational(0));
    }
  // recession of K_n - C_j is -recession(C_j)
  for (const auto& cr : gc.rays) p.add(pair_terms(cr.negated()), lp::Rel::Ge, Rational(0));
  for (const auto& bv : ball_vertices(inst.ambient, e))
    p.add(pair_terms(bv), lp::Rel::Le, Rational(1));
  p.maximize({{beta, Rational(1)}, {alpha, Rational(-1)}});
  auto res = lp::solve(p);
  if (res.status != lp::Status::Optimal || sgn(res.value) <= 0)
    throw CertificateError("separation program failed to separate the instance");
  std::vector<Functional::Entry> ent;
  for (uint32_t i : e) {
    Rational v = res.x[lam[i]];
    if (sgn(v) != 0) ent.emplace_back(i, v);
  }
  Functional lambda(std::move(ent));
  // re-verify the inequality independently through support values
  Scalar sup_c = support_value(lambda, inst.cj);
  Scalar min_k = -support_value(lambda.negated(), inst.kn);
  if (!sup_c.is_rational() || !min_k.is_rational() ||
      cmp(sup_c.rational() + r, min_k.rational()) > 0)
    throw CertificateError("separating functional violates the margin inequality");
  if (dual_norm_eval(inst.ambient, lambda) != Scalar::exact(Rational(1)))
    throw CertificateError("separating functional is not unit dual norm");
  return lambda;
}

/**
 * Nested compact sections of a hyperplane L around the nearest point to the
 * anchor; the scenario convention places the anchor at distance exactly 1.
 * Each K_m is a zonotope section p + (1 - 1/m) M [-1,1]^k in hyperplane
 * directions, so K_1 subset K_2 subset ... with d(K_m, anchor) < 1 + 1/m.
 */
inline CompactFamily exhaust_hyperplane(const ConvexSet& level_set, const Vector& anchor,
                                        long count, const NormSpec& ambient,
                                        const Rational& box_radius) {
  const auto* hp = level_set.as<ConvexSet::Hyperplane>();
  if (!hp) throw SetError("exhaust_hyperplane: expected a hyperplane");
  if (count < 1) throw Error("exhaust_hyperplane: count must be positive");
  if (sgn(box_radius) <= 0) throw Error("exhaust_hyperplane: box radius must be positive");
  if (pairing(hp->f, anchor) == hp->a)
    throw SetError("exhaust_hyperplane: anchor lies on the hyperplane");
  Scalar d0 = distance(anchor, level_set, ambient);
  if (d0 < Scalar::exact(Rational(1)))
    throw CertificateError("exhaust_hyperplane: anchor must be at distance >= 1, got " +
                           d0.str());
  Vector p = nearest_point(anchor, level_set, ambient);
  std::vector<uint32_t> e = hp->f.support();
  RatMat sys{detail::to_dense(e, hp->f)};
  RatMat kb = linalg::kernel_basis(sys);
  if (kb.size() > 6) throw SetError("exhaust_hyperplane: hyperplane dimension too large");
  std::vector<ConvexSet> members;
  for (long m = 1; m <= count; ++m) {
    Rational s = (Rational(1) - Rational(1, m)) * box_radius;
    std::vector<Vector> verts;
    const std::size_t k = kb.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
      Vector v = p;
      for (std::size_t i = 0; i < k; ++i) {
        Rational c = ((mask >> i) & 1) ? s : -s;
        v = v.plus(detail::vector_from_dense(e, kb[i]).scaled(c));
      }
      bool dup = false;
      for (const auto& existing : verts)
        if (existing == v) dup = true;
      if (!dup) verts.push_back(std::move(v));
    }
    members.push_back(ConvexSet::polytope(std::move(verts)));
  }
  // verify membership in L and the distance control
  for (long m = 1; m <= count; ++m) {
    const auto* poly = members[m - 1].as<ConvexSet::Polytope>();
    for (const auto& v : poly->vertices)
      if (pairing(hp->f, v) != hp->a)
        throw CertificateError("exhaust_hyperplane: section escapes the hyperplane");
    Scalar dm = distance(anchor, members[m - 1], ambient);
    Scalar bound = Scalar::exact(Rational(1) + Rational(1, m));
    if (!(dm < bound))
      throw CertificateError("exhaust_hyperplane: distance control d(K_m, anchor) < 1 + 1/m "
                             "violated at m = " + std::to_string(m));
  }
  return CompactFamily::of(std::move(members));
}

}  // namespace convlab
