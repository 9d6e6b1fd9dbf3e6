#pragma once

#include <optional>
#include <string>
#include <vector>

#include "convlab/scalar.hpp"

namespace convlab {

struct TraceEntry {
  long n;
  Scalar value;
};

struct TailDecision {
  bool supported = false;
  Scalar max_tail_deviation;
  std::optional<std::size_t> witness_pos;  // index into the deviation list
  std::string rule;                        // "tail-max" | "decay" | witness reason
  bool exact = true;
};

/**
 * Decides whether a nonnegative deviation trace vanishes in the limit, from
 * the tail [horizon/2, horizon]. Accepts either deviations already below
 * tolerance, or a monotone tail that at least quarters over the tail span
 * (geometric-progress test); verdicts are horizon-bounded statements, not
 * proofs. Exact rational comparisons whenever the data is exact.
 */
inline TailDecision tail_decide(const std::vector<TraceEntry>& dev, const Rational& tol) {
  TailDecision d;
  if (dev.empty()) throw Error("tail_decide: empty trace");
  for (const auto& e : dev)
    if (!e.value.is_exact()) d.exact = false;
  const long horizon = dev.back().n;
  const long lo = (horizon + 1) / 2;
  std::vector<std::size_t> tail;
  for (std::size_t i = 0; i < dev.size(); ++i)
    if (dev[i].n >= lo) tail.push_back(i);
  if (tail.empty())
    for (std::size_t i = 0; i < dev.size(); ++i) tail.push_back(i);

  const Scalar tol_s = Scalar::exact(tol);
  std::size_t max_pos = tail[0];
  for (std::size_t i : tail)
    if (dev[i].value > dev[max_pos].value) max_pos = i;
  d.max_tail_deviation = dev[max_pos].value;

  if (d.max_tail_deviation <= tol_s) {
    d.supported = true;
    d.rule = "tail-max";
    return d;
  }
  d.witness_pos = max_pos;
  if (tail.size() < 3) {
    d.rule = "tail too short to certify decay";
    return d;
  }
  // monotone within tolerance across the tail
  for (std::size_t k = 0; k + 1 < tail.size(); ++k) {
    if (dev[tail[k + 1]].value > dev[tail[k]].value + tol_s) {
      d.rule = "tail deviation not decreasing";
      return d;
    }
  }
  // geometric progress over the tail span
  const Scalar first = dev[tail.front()].value;
  const Scalar last = dev[tail.back()].value;
  Scalar budget = first * Scalar::exact(rat(3, 4)) + tol_s;
  if (last <= budget) {
    d.supported = true;
    d.witness_pos.reset();
    d.rule = "decay";
    return d;
  }
  d.rule = "tail deviation stalls above tolerance";
  return d;
}

/** Deviations |value_n - limit| of a trace against a declared limit. */
inline std::vector<TraceEntry> deviations_from(const std::vector<TraceEntry>& trace,
                                               const Scalar& limit) {
  std::vector<TraceEntry> out;
  out.reserve(trace.size());
  for (const auto& e : trace) {
    Scalar dv;
    if (!e.value.is_finite() || !limit.is_finite())
      dv = (Scalar::compare(e.value, limit) == 0) ? Scalar::exact(Rational(0))
                                                  : Scalar::pos_inf();
    else
      dv = (e.value - limit).abs();
    out.push_back({e.n, dv});
  }
  return out;
}

/** One-sided excesses max(0, value_n - bound) for limsup-style conditions. */
inline std::vector<TraceEntry> excess_over(const std::vector<TraceEntry>& trace,
                                           const Scalar& bound) {
  std::vector<TraceEntry> out;
  out.reserve(trace.size());
  const Scalar zero = Scalar::exact(Rational(0));
  for (const auto& e : trace) {
    Scalar ex;
    if (!e.value.is_finite() || !bound.is_finite())
      ex = (Scalar::compare(e.value, bound) <= 0) ? zero : Scalar::pos_inf();
    else
      ex = scalar_max(zero, e.value - bound);
    out.push_back({e.n, ex});
  }
  return out;
}

}  // namespace convlab
