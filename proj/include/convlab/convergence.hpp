#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "convlab/sets.hpp"
#include "convlab/tail.hpp"
#include "convlab/util.hpp"

namespace convlab {

enum class Notion { Wijsman, Slice, WeakCompactGap, CompactGap, Mosco, LevelSetWijsman };

inline std::string notion_name(Notion n) {
  switch (n) {
    case Notion::Wijsman:
      return "wijsman";
    case Notion::Slice:
      return "slice";
    case Notion::WeakCompactGap:
      return "weakCompactGap";
    case Notion::CompactGap:
      return "compactGap";
    case Notion::Mosco:
      return "mosco";
    case Notion::LevelSetWijsman:
      return "levelSetWijsman";
  }
  return "?";
}

/** Horizon-bounded set sequence with its declared limit. */
struct SetSequence {
  std::function<ConvexSet(long)> generator;
  ConvexSet limit;
  NormSpec ambient;
  Window window;
  long start;
  long horizon;
};

struct FunctionalSequence {
  std::function<Functional(long)> generator;
  Functional limit;
  NormSpec norm;  // the norm whose dual is probed
  long start;
  long horizon;
};

struct VectorSequence {
  std::function<Vector(long)> generator;
  Vector limit;
  long start;
  long horizon;
};

/** Test objects a convergence notion is probed against. */
struct TestFamily {
  enum class Kind { Points, Compact, WeakCompact, Bounded };
  Kind kind;
  std::string name;
  std::vector<Vector> points;
  std::vector<ConvexSet> sets;

  static TestFamily of_points(std::string name, std::vector<Vector> pts) {
    if (pts.empty()) throw Error("point family must be non-empty");
    return TestFamily{Kind::Points, std::move(name), std::move(pts), {}};
  }
  static TestFamily of_sets(Kind kind, std::string name, std::vector<ConvexSet> sets) {
    if (kind == Kind::Points) throw Error("set family cannot have kind points");
    if (sets.empty()) throw Error("set family must be non-empty");
    if (kind == Kind::Compact || kind == Kind::WeakCompact) {
      for (const auto& s : sets)
        if (!s.as<ConvexSet::Polytope>())
          throw SetError(name + ": compact family members must be polytopes");
    }
    return TestFamily{kind, std::move(name), {}, std::move(sets)};
  }
};

struct Witness {
  std::string object_id;
  long n;
  Scalar lhs;  // trace value at n
  Scalar rhs;  // limit value
};

struct TraceRow {
  std::string object_id;
  long n;
  Scalar value;
};

struct ConvergenceVerdict {
  Notion notion;
  bool supported = false;
  std::optional<Witness> witness;
  Scalar max_tail_deviation;
  std::vector<TraceRow> trace;
  long horizon = 0;
  Rational tolerance;
  bool exact = true;
  bool internal_consistency_ok = true;
  std::vector<std::string> notes;
};

namespace detail {

struct ObjectTrace {
  std::string id;
  std::vector<TraceEntry> values;
  Scalar limit_value;
};

/** Folds per-object tail decisions into one verdict. */
inline ConvergenceVerdict fold_traces(Notion notion,
                                      const std::vector<ObjectTrace>& objects,
                                      long horizon, const Rational& tol) {
  ConvergenceVerdict v;
  v.notion = notion;
  v.horizon = horizon;
  v.tolerance = tol;
  v.supported = true;
  v.max_tail_deviation = Scalar::exact(Rational(0));
  for (const auto& obj : objects) {
    for (const auto& e : obj.values) v.trace.push_back({obj.id, e.n, e.value});
    auto dev = deviations_from(obj.values, obj.limit_value);
    auto d = tail_decide(dev, tol);
    if (!d.exact) v.exact = false;
    v.max_tail_deviation = scalar_max(v.max_tail_deviation, d.max_tail_deviation);
    if (!d.supported && v.supported) {
      v.supported = false;
      std::size_t pos = d.witness_pos.value_or(dev.size() - 1);
      v.witness = Witness{obj.id, obj.values[pos].n, obj.values[pos].value,
                          obj.limit_value};
      v.notes.push_back(obj.id + ": " + d.rule);
    }
  }
  return v;
}

}  // namespace detail

/** Wijsman check: d(x, C_n) -> d(x, C) for every test point. */
inline ConvergenceVerdict wijsman_check(const SetSequence& seq, const TestFamily& pts,
                                        const Rational& tol) {
  if (pts.kind != TestFamily::Kind::Points)
    throw Error("wijsman_check expects a point family");
  std::vector<detail::ObjectTrace> objects;
  for (std::size_t i = 0; i < pts.points.size(); ++i) {
    const Vector& x = pts.points[i];
    detail::ObjectTrace obj;
    obj.id = pts.name + "[" + std::to_string(i) + "]";
    auto values = parallel_map_range<Scalar>(seq.start, seq.horizon + 1, [&](long n) {
      return distance(x, seq.generator(n), seq.ambient);
    });
    for (long n = seq.start; n <= seq.horizon; ++n)
      obj.values.push_back({n, values[n - seq.start]});
    obj.limit_value = distance(x, seq.limit, seq.ambient);
    objects.push_back(std::move(obj));
  }
  return detail::fold_traces(Notion::Wijsman, objects, seq.horizon, tol);
}

/** Gap convergence against compact / weakly compact / bounded families. */
inline ConvergenceVerdict gap_convergence_check(const SetSequence& seq,
                                                const TestFamily& fam, Notion notion,
                                                const Rational& tol) {
  TestFamily::Kind want;
  switch (notion) {
    case Notion::Slice:
      want = TestFamily::Kind::Bounded;
      break;
    case Notion::WeakCompactGap:
      want = TestFamily::Kind::WeakCompact;
      break;
    case Notion::CompactGap:
      want = TestFamily::Kind::Compact;
      break;
    default:
      throw Error("gap_convergence_check: unsupported notion");
  }
  if (fam.kind != want)
    throw Error("gap_convergence_check: family kind does not match the notion");
  std::vector<detail::ObjectTrace> objects;
  for (std::size_t i = 0; i < fam.sets.size(); ++i) {
    const ConvexSet& w = fam.sets[i];
    detail::ObjectTrace obj;
    obj.id = fam.name + "[" + std::to_string(i) + "]";
    auto values = parallel_map_range<Scalar>(seq.start, seq.horizon + 1, [&](long n) {
      return gap(w, seq.generator(n), seq.ambient);
    });
    for (long n = seq.start; n <= seq.horizon; ++n)
      obj.values.push_back({n, values[n - seq.start]});
    obj.limit_value = gap(w, seq.limit, seq.ambient);
    objects.push_back(std::move(obj));
  }
  return detail::fold_traces(notion, objects, seq.horizon, tol);
}

/**
 * Mosco check. M(i): distances from sampled limit points vanish. M(ii):
 * canonical nearest-point selections per probe; convergent selections are
 * extrapolated and their limits must lie in C, oscillating ones are
 * clustered by tolerance balls and every representative must lie in C.
 * Selections that wander beyond the boundedness guard are skipped, as the
 * relative-weak-compactness hypothesis excludes them.
 */
inline ConvergenceVerdict mosco_check(const SetSequence& seq, const TestFamily& probes,
                                      const Rational& tol) {
  if (probes.kind != TestFamily::Kind::Points)
    throw Error("mosco_check expects a point family");
  ConvergenceVerdict v;
  v.notion = Notion::Mosco;
  v.horizon = seq.horizon;
  v.tolerance = tol;
  v.supported = true;
  v.max_tail_deviation = Scalar::exact(Rational(0));
  const Scalar tol_s = Scalar::exact(tol);
  const Scalar bound_guard = Scalar::exact(Rational(1000000000));

  // M(i): probe points projected onto C
  for (std::size_t i = 0; i < probes.points.size(); ++i) {
    Vector x0 = nearest_point(probes.points[i], seq.limit, seq.ambient);
    detail::ObjectTrace obj;
    obj.id = "Mi:" + probes.name + "[" + std::to_string(i) + "]";
    auto values = parallel_map_range<Scalar>(seq.start, seq.horizon + 1, [&](long n) {
      return distance(x0, seq.generator(n), seq.ambient);
    });
    for (long n = seq.start; n <= seq.horizon; ++n)
      obj.values.push_back({n, values[n - seq.start]});
    auto d = tail_decide(obj.values, tol);  // limit 0: values are the deviations
    if (!d.exact) v.exact = false;
    v.max_tail_deviation = scalar_max(v.max_tail_deviation, d.max_tail_deviation);
    for (const auto& e : obj.values) v.trace.push_back({obj.id, e.n, e.value});
    if (!d.supported) {
      v.notes.push_back("M(i) refuted at " + obj.id + ": " + d.rule);
      if (v.supported) {
        v.supported = false;
        std::size_t pos = d.witness_pos.value_or(obj.values.size() - 1);
        v.witness = Witness{obj.id, obj.values[pos].n, obj.values[pos].value,
                            Scalar::exact(Rational(0))};
      }
    }
  }

  // M(ii): canonical nearest-point selections
  for (std::size_t i = 0; i < probes.points.size(); ++i) {
    const Vector& probe = probes.points[i];
    std::string id = "Mii:" + probes.name + "[" + std::to_string(i) + "]";
    auto selection = parallel_map_range<Vector>(seq.start, seq.horizon + 1, [&](long n) {
      return nearest_point(probe, seq.generator(n), seq.ambient);
    });
    auto sel = [&](long n) -> const Vector& { return selection[n - seq.start]; };
    for (long n = seq.start; n <= seq.horizon; ++n)
      v.trace.push_back({id, n, distance(sel(n), seq.limit, seq.ambient)});
    const long lo = std::max(seq.start, (seq.horizon + 1) / 2);
    bool bounded = true;
    for (long n = lo; n <= seq.horizon; ++n)
      if (norm_eval(seq.ambient, sel(n)) > bound_guard) bounded = false;
    if (!bounded) {
      v.notes.push_back("M(ii) skipped unbounded selection at " + id);
      continue;
    }
    const long m1 = lo;
    const long m3 = seq.horizon;
    const long m2 = (m1 + m3) / 2;
    bool decided = false;
    if (m1 < m2 && m2 < m3) {
      Scalar s12 = norm_eval(seq.ambient, sel(m2).minus(sel(m1)));
      Scalar s23 = norm_eval(seq.ambient, sel(m3).minus(sel(m2)));
      bool cauchy = s23 <= s12 * Scalar::exact(rat(3, 4)) + tol_s;
      if (cauchy) {
        // extrapolate the 1/n-rate selection to its limit
        Rational a(m3), b(m1);
        Vector lim = sel(m3).scaled(a).minus(sel(m1).scaled(b)).scaled(Rational(1) / (a - b));
        Scalar d = distance(lim, seq.limit, seq.ambient);
        if (!d.is_exact()) v.exact = false;
        v.max_tail_deviation = scalar_max(v.max_tail_deviation, d);
        if (d > tol_s) {
          v.notes.push_back("M(ii) refuted at " + id +
                            ": extrapolated selection limit escapes C");
          if (v.supported) {
            v.supported = false;
            v.witness = Witness{id, m3, d, Scalar::exact(Rational(0))};
          }
        }
        decided = true;
      }
    }
    if (!decided) {
      // cluster the tail selections by tolerance balls
      std::vector<std::pair<long, Vector>> reps;
      for (long n = lo; n <= seq.horizon; ++n) {
        bool placed = false;
        for (const auto& [rn, r] : reps)
          if (norm_eval(seq.ambient, sel(n).minus(r)) <= tol_s) placed = true;
        if (!placed) reps.emplace_back(n, sel(n));
      }
      for (const auto& [rn, r] : reps) {
        Scalar d = distance(r, seq.limit, seq.ambient);
        if (!d.is_exact()) v.exact = false;
        v.max_tail_deviation = scalar_max(v.max_tail_deviation, d);
        if (d > tol_s) {
          v.notes.push_back("M(ii) refuted at " + id + ": cluster representative at n=" +
                            std::to_string(rn) + " escapes C");
          if (v.supported) {
            v.supported = false;
            v.witness = Witness{id, rn, d, Scalar::exact(Rational(0))};
          }
        }
      }
    }
  }
  return v;
}

/**
 * Level-set criterion: hyperplane level sets converge Wijsman exactly when
 * the functionals converge pointwise and in dual norm. Always cross-checked
 * against the direct Wijsman trace on the hyperplane sequence; disagreement
 * is surfaced as an internal-consistency failure.
 */
inline ConvergenceVerdict level_set_wijsman_criterion(const FunctionalSequence& fseq,
                                                      const Rational& level,
                                                      const TestFamily& pts,
                                                      const Rational& tol) {
  if (pts.kind != TestFamily::Kind::Points)
    throw Error("level_set_wijsman_criterion expects a point family");
  if (fseq.limit.zero()) throw Error("level-set criterion: zero limit functional");
  std::vector<detail::ObjectTrace> objects;
  for (std::size_t i = 0; i < pts.points.size(); ++i) {
    const Vector& x = pts.points[i];
    detail::ObjectTrace obj;
    obj.id = "pairing:" + pts.name + "[" + std::to_string(i) + "]";
    for (long n = fseq.start; n <= fseq.horizon; ++n)
      obj.values.push_back({n, Scalar::exact(pairing(fseq.generator(n), x))});
    obj.limit_value = Scalar::exact(pairing(fseq.limit, x));
    objects.push_back(std::move(obj));
  }
  {
    detail::ObjectTrace obj;
    obj.id = "dualNorm";
    auto values = parallel_map_range<Scalar>(fseq.start, fseq.horizon + 1, [&](long n) {
      return dual_norm_eval(fseq.norm, fseq.generator(n));
    });
    for (long n = fseq.start; n <= fseq.horizon; ++n)
      obj.values.push_back({n, values[n - fseq.start]});
    obj.limit_value = dual_norm_eval(fseq.norm, fseq.limit);
    objects.push_back(std::move(obj));
  }
  ConvergenceVerdict v =
      detail::fold_traces(Notion::LevelSetWijsman, objects, fseq.horizon, tol);

  // cross-check against the direct hyperplane Wijsman trace
  std::vector<uint32_t> win = fseq.limit.support();
  for (long n = fseq.start; n <= fseq.horizon; ++n)
    for (uint32_t idx : fseq.generator(n).support()) win.push_back(idx);
  for (const auto& x : pts.points) collect_support(x, &win);
  win = norm_index_closure(fseq.norm, std::move(win));
  SetSequence hseq{
      [&fseq, level](long n) { return ConvexSet::hyperplane(fseq.generator(n), level); },
      ConvexSet::hyperplane(fseq.limit, level),
      fseq.norm,
      Window(win),
      fseq.start,
      fseq.horizon};
  ConvergenceVerdict direct = wijsman_check(hseq, pts, tol);
  if (direct.supported != v.supported) {
    v.internal_consistency_ok = false;
    v.notes.push_back(std::string("internal-consistency failure: direct Wijsman check is ") +
                      (direct.supported ? "supported" : "refuted") +
                      " but the criterion says otherwise");
  }
  if (!v.exact || !direct.exact) v.exact = false;
  return v;
}

}  // namespace convlab
