#pragma once

#include <optional>
#include <string>
#include <vector>

#include "convlab/convergence.hpp"

namespace convlab {

/**
 * Instance-level probe outcome. `vacuous` means the hypotheses of the
 * implication never held within tolerance, so nothing is claimed.
 */
struct ProbeReport {
  enum class Property { WStarKadec, WStarTauKadec, Lur, PropertyStar };
  enum class Status { Pass, Fail, Vacuous };

  Property property;
  Status status = Status::Vacuous;
  std::optional<Witness> witness;
  std::vector<TraceRow> traces;
  std::vector<std::string> notes;
  long horizon = 0;
  Rational tolerance;
  bool exact = true;
};

inline std::string probe_property_name(ProbeReport::Property p) {
  switch (p) {
    case ProbeReport::Property::WStarKadec:
      return "wStarKadec";
    case ProbeReport::Property::WStarTauKadec:
      return "wStarTauKadec";
    case ProbeReport::Property::Lur:
      return "lur";
    case ProbeReport::Property::PropertyStar:
      return "propertyStar";
  }
  return "?";
}

inline std::string probe_status_name(ProbeReport::Status s) {
  switch (s) {
    case ProbeReport::Status::Pass:
      return "pass";
    case ProbeReport::Status::Fail:
      return "fail";
    case ProbeReport::Status::Vacuous:
      return "vacuous";
  }
  return "?";
}

namespace detail {

/** Checks the w*-Kadec hypotheses: dual norms converge and pairings converge. */
inline bool kadec_hypotheses(const FunctionalSequence& fseq, const std::vector<Vector>& pts,
                             const Rational& tol, ProbeReport* report) {
  {
    std::vector<TraceEntry> trace;
    auto values = parallel_map_range<Scalar>(fseq.start, fseq.horizon + 1, [&](long n) {
      return dual_norm_eval(fseq.norm, fseq.generator(n));
    });
    for (long n = fseq.start; n <= fseq.horizon; ++n)
      trace.push_back({n, values[n - fseq.start]});
    Scalar limit = dual_norm_eval(fseq.norm, fseq.limit);
    for (const auto& e : trace) report->traces.push_back({"hyp:dualNorm", e.n, e.value});
    auto d = tail_decide(deviations_from(trace, limit), tol);
    if (!d.exact) report->exact = false;
    if (!d.supported) {
      report->notes.push_back("hypothesis fails: dual norms do not converge (" + d.rule + ")");
      return false;
    }
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::vector<TraceEntry> trace;
    for (long n = fseq.start; n <= fseq.horizon; ++n)
      trace.push_back({n, Scalar::exact(pairing(fseq.generator(n), pts[i]))});
    Scalar limit = Scalar::exact(pairing(fseq.limit, pts[i]));
    std::string id = "hyp:wstar[" + std::to_string(i) + "]";
    for (const auto& e : trace) report->traces.push_back({id, e.n, e.value});
    auto d = tail_decide(deviations_from(trace, limit), tol);
    if (!d.supported) {
      report->notes.push_back("hypothesis fails: w*-convergence breaks at " + id);
      return false;
    }
  }
  report->notes.push_back("hypotheses verified on " + std::to_string(pts.size()) +
                          " probe vectors");
  return true;
}

inline void conclude(ProbeReport* report, const std::vector<TraceEntry>& conclusion,
                     const std::string& id, const Rational& tol) {
  for (const auto& e : conclusion) report->traces.push_back({id, e.n, e.value});
  auto d = tail_decide(conclusion, tol);
  if (!d.exact) report->exact = false;
  if (d.supported) {
    if (report->status != ProbeReport::Status::Fail)
      report->status = ProbeReport::Status::Pass;
  } else {
    report->status = ProbeReport::Status::Fail;
    if (!report->witness) {
      std::size_t pos = d.witness_pos.value_or(conclusion.size() - 1);
      report->witness = Witness{id, conclusion[pos].n, conclusion[pos].value,
                                Scalar::exact(Rational(0))};
    }
    report->notes.push_back(id + ": " + d.rule);
  }
}

}  // namespace detail

/**
 * Sequential w*-Kadec probe: under w*-convergence plus convergence of dual
 * norms, does dual-norm convergence of f_n - f follow? The w*-hypotheses are
 * verified only on the supplied probe vectors (recorded in the report).
 */
inline ProbeReport probe_w_star_kadec(const FunctionalSequence& fseq,
                                      const std::vector<Vector>& pts, const Rational& tol) {
  ProbeReport r;
  r.property = ProbeReport::Property::WStarKadec;
  r.horizon = fseq.horizon;
  r.tolerance = tol;
  if (pts.empty()) throw Error("probe_w_star_kadec: no probe vectors");
  if (!detail::kadec_hypotheses(fseq, pts, tol, &r)) {
    r.status = ProbeReport::Status::Vacuous;
    return r;
  }
  std::vector<TraceEntry> conclusion;
  auto values = parallel_map_range<Scalar>(fseq.start, fseq.horizon + 1, [&](long n) {
    return dual_norm_eval(fseq.norm, fseq.generator(n).minus(fseq.limit));
  });
  for (long n = fseq.start; n <= fseq.horizon; ++n)
    conclusion.push_back({n, values[n - fseq.start]});
  detail::conclude(&r, conclusion, "normGap", tol);
  return r;
}

/**
 * Sequential w*-tau-Kadec probe: same hypotheses, Mackey conclusion — the
 * suprema over each weakly compact test set (polytope vertex maxima) must
 * vanish.
 */
inline ProbeReport probe_w_star_tau_kadec(const FunctionalSequence& fseq,
                                          const std::vector<Vector>& pts,
                                          const CompactFamily& fam, const Rational& tol) {
  ProbeReport r;
  r.property = ProbeReport::Property::WStarTauKadec;
  r.horizon = fseq.horizon;
  r.tolerance = tol;
  if (pts.empty()) throw Error("probe_w_star_tau_kadec: no probe vectors");
  if (fam.members.empty()) throw Error("probe_w_star_tau_kadec: empty compact family");
  if (!detail::kadec_hypotheses(fseq, pts, tol, &r)) {
    r.status = ProbeReport::Status::Vacuous;
    return r;
  }
  for (std::size_t k = 0; k < fam.members.size(); ++k) {
    const auto* poly = fam.members[k].as<ConvexSet::Polytope>();
    std::vector<TraceEntry> conclusion;
    for (long n = fseq.start; n <= fseq.horizon; ++n) {
      Functional diff = fseq.generator(n).minus(fseq.limit);
      Rational best(0);
      for (const auto& v : poly->vertices) {
        Rational val = abs(pairing(diff, v));
        if (cmp(val, best) > 0) best = val;
      }
      conclusion.push_back({n, Scalar::exact(best)});
    }
    detail::conclude(&r, conclusion, "mackey:K[" + std::to_string(k) + "]", tol);
  }
  return r;
}

/**
 * LUR probe at x: if 2||x_n||^2 + 2||x||^2 - ||x_n + x||^2 -> 0 then
 * ||x_n - x|| -> 0 must follow. The quadratic expression is exact for every
 * norm family that carries exact squares.
 */
inline ProbeReport probe_lur(const NormSpec& norm, const VectorSequence& xseq,
                             const Vector& x, const Rational& tol) {
  ProbeReport r;
  r.property = ProbeReport::Property::Lur;
  r.horizon = xseq.horizon;
  r.tolerance = tol;
  Rational xsq = norm_eval(norm, x).square();
  std::vector<TraceEntry> expr;
  for (long n = xseq.start; n <= xseq.horizon; ++n) {
    Vector xn = xseq.generator(n);
    Rational val = 2 * norm_eval(norm, xn).square() + 2 * xsq -
                   norm_eval(norm, xn.plus(x)).square();
    expr.push_back({n, Scalar::exact(val)});
  }
  for (const auto& e : expr) r.traces.push_back({"lurExpr", e.n, e.value});
  // the LUR expression is nonnegative (parallelogram/convexity), so treat as deviation
  auto hyp = tail_decide(expr, tol);
  if (!hyp.supported) {
    r.status = ProbeReport::Status::Vacuous;
    r.notes.push_back("hypothesis fails: LUR expression does not vanish (" + hyp.rule + ")");
    return r;
  }
  std::vector<TraceEntry> conclusion;
  for (long n = xseq.start; n <= xseq.horizon; ++n)
    conclusion.push_back({n, norm_eval(norm, xseq.generator(n).minus(x))});
  detail::conclude(&r, conclusion, "normGap", tol);
  return r;
}

/**
 * Property (*) probe: <x_n*, x_n> -> <x*, x> whenever x_n* is w*-convergent
 * and x_n weakly convergent. Both convergences are checked pointwise on the
 * window coordinates and supplied probe vectors.
 */
inline ProbeReport property_star_check(const FunctionalSequence& fseq,
                                       const VectorSequence& xseq, const Vector& x,
                                       const Rational& tol) {
  ProbeReport r;
  r.property = ProbeReport::Property::PropertyStar;
  r.horizon = std::min(fseq.horizon, xseq.horizon);
  r.tolerance = tol;
  long start = std::max(fseq.start, xseq.start);
  // weak hypotheses: coordinatewise convergence of x_n to x
  std::vector<uint32_t> coords = x.support();
  for (long n = start; n <= r.horizon; ++n)
    for (uint32_t i : xseq.generator(n).support()) coords.push_back(i);
  coords = sorted_unique(std::move(coords));
  bool hyp_ok = true;
  for (uint32_t i : coords) {
    std::vector<TraceEntry> tr;
    for (long n = start; n <= r.horizon; ++n)
      tr.push_back({n, Scalar::exact(xseq.generator(n).at(i))});
    auto d = tail_decide(deviations_from(tr, Scalar::exact(x.at(i))), tol);
    if (!d.supported) {
      hyp_ok = false;
      r.notes.push_back("hypothesis fails: coordinate " + std::to_string(i) +
                        " of x_n does not converge");
      break;
    }
  }
  if (hyp_ok) {
    std::vector<Vector> probes;
    for (uint32_t i : coords) probes.push_back(Vector::unit(i));
    hyp_ok = detail::kadec_hypotheses(
        FunctionalSequence{fseq.generator, fseq.limit, fseq.norm, start, r.horizon},
        probes, tol, &r);
  }
  if (!hyp_ok) {
    r.status = ProbeReport::Status::Vacuous;
    return r;
  }
  std::vector<TraceEntry> pairing_trace;
  for (long n = start; n <= r.horizon; ++n)
    pairing_trace.push_back({n, Scalar::exact(pairing(fseq.generator(n), xseq.generator(n)))});
  Scalar limit = Scalar::exact(pairing(fseq.limit, x));
  for (const auto& e : pairing_trace) r.traces.push_back({"pairing", e.n, e.value});
  auto d = tail_decide(deviations_from(pairing_trace, limit), tol);
  if (!d.exact) r.exact = false;
  if (d.supported) {
    r.status = ProbeReport::Status::Pass;
  } else {
    r.status = ProbeReport::Status::Fail;
    std::size_t pos = d.witness_pos.value_or(pairing_trace.size() - 1);
    r.witness = Witness{"pairing", pairing_trace[pos].n, pairing_trace[pos].value, limit};
    r.notes.push_back("pairing: " + d.rule);
  }
  return r;
}

/** Data of a property-(*) failure used to drive the renorming construction. */
struct PropertyStarWitness {
  FunctionalSequence fseq;  // x_n* with limit x*
  VectorSequence xseq;      // x_n with limit x
  std::vector<long> indices;  // the index subset J
};

/**
 * Builds the renormed dual ball B = {|<Lam, y>| <= 1} ∩ {||Lam|| <= 2} from
 * a (*)-failure witness. Validates the normalization preconditions, checks
 * the constructed gauge values |||y* + x_j*||| <= 1 = |||y* + x*||| exactly,
 * and returns the predual norm; a witness with ||x*|| = 1 short-circuits to
 * the base norm, which already fails the probe.
 */
inline NormSpec build_prop25_renorm(const PropertyStarWitness& witness, const Vector& y,
                                    const Functional& y_star) {
  const NormSpec& base = witness.fseq.norm;
  const Functional& x_star = witness.fseq.limit;
  const Scalar one = Scalar::exact(Rational(1));
  Scalar x_star_norm = dual_norm_eval(base, x_star);
  if (x_star_norm == one) return base;  // degenerate branch: base norm already fails
  if (!x_star.zero())
    throw Error("build_prop25_renorm: witness must be normalized to x* = 0 (or ||x*|| = 1)");
  if (norm_eval(base, y) != one)
    throw Error("build_prop25_renorm: ||y|| = 1 violated, got " +
                norm_eval(base, y).str());
  if (pairing(y_star, y) != Rational(1))
    throw Error("build_prop25_renorm: <y*, y> = 1 violated, got " +
                format_rational(pairing(y_star, y)));
  if (dual_norm_eval(base, y_star) != one)
    throw Error("build_prop25_renorm: ||y*|| = 1 violated, got " +
                dual_norm_eval(base, y_star).str());
  if (witness.indices.empty()) throw Error("build_prop25_renorm: empty index subset J");
  for (long j : witness.indices) {
    Rational p = pairing(witness.fseq.generator(j), y);
    if (sgn(p) > 0)
      throw Error("build_prop25_renorm: <x_j*, y> <= 0 violated at j = " +
                  std::to_string(j) + " with value " + format_rational(p));
    if (dual_norm_eval(base, witness.fseq.generator(j)) > one)
      throw Error("build_prop25_renorm: ||x_j*|| <= 1 violated at j = " + std::to_string(j));
  }
  std::vector<uint32_t> win = y.support();
  collect_support(y_star, &win);
  for (long j : witness.indices)
    for (uint32_t i : witness.fseq.generator(j).support()) win.push_back(i);
  DualBallDescription ball{{{y, Rational(1)}}, Rational(2),
                           std::make_shared<const NormSpec>(base),
                           Window(sorted_unique(std::move(win)))};
  NormSpec renorm = NormSpec::predual_of_ball(std::move(ball));
  // the defining gauge identities of the construction, exact
  if (dual_norm_eval(renorm, y_star.plus(x_star)) != one)
    throw Error("build_prop25_renorm: |||y* + x*||| = 1 violated");
  for (long j : witness.indices) {
    Scalar g = dual_norm_eval(renorm, y_star.plus(witness.fseq.generator(j)));
    if (g > one)
      throw Error("build_prop25_renorm: |||y* + x_j*||| <= 1 violated at j = " +
                  std::to_string(j) + " with value " + g.str());
  }
  return renorm;
}

}  // namespace convlab
