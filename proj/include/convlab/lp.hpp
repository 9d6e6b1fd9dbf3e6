#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "convlab/rational.hpp"

namespace convlab::lp {

enum class Rel { Le, Ge, Eq };

struct Term {
  int var;
  Rational coef;
};

struct Constraint {
  std::vector<Term> terms;
  Rel rel;
  Rational rhs;
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
  Status status = Status::Infeasible;
  Rational value;
  RatVec x;  // one value per declared variable
};

/**
 * Exact-rational linear program. Variables are free unless declared
 * non-negative; all arithmetic is in mpq, pivoting uses Bland's rule, so the
 * solve is deterministic and terminates without tolerances.
 */
class Problem {
 public:
  int add_var(bool nonneg = false) {
    nonneg_.push_back(nonneg);
    return static_cast<int>(nonneg_.size()) - 1;
  }
  int num_vars() const { return static_cast<int>(nonneg_.size()); }

  void add(std::vector<Term> terms, Rel rel, Rational rhs) {
    rows_.push_back(Constraint{std::move(terms), rel, std::move(rhs)});
  }
  void maximize(std::vector<Term> objective) {
    obj_ = std::move(objective);
    maximize_ = true;
  }
  void minimize(std::vector<Term> objective) {
    obj_ = std::move(objective);
    maximize_ = false;
  }

  const std::vector<Constraint>& rows() const { return rows_; }
  const std::vector<Term>& objective() const { return obj_; }
  bool maximizing() const { return maximize_; }
  bool var_nonneg(int v) const { return nonneg_[v]; }

 private:
  std::vector<bool> nonneg_;
  std::vector<Constraint> rows_;
  std::vector<Term> obj_;
  bool maximize_ = true;
};

namespace detail {

class Simplex {
 public:
  explicit Simplex(const Problem& p) : p_(p) {
    // column layout: one column per nonneg var, two per free var, then slacks,
    // then artificials
    col_of_var_.resize(p.num_vars());
    for (int v = 0; v < p.num_vars(); ++v) {
      col_of_var_[v] = ncols_;
      ncols_ += p.var_nonneg(v) ? 1 : 2;
    }
    struct PreRow {
      std::vector<std::pair<int, Rational>> cols;  // structural columns
      Rational rhs;
      Rel rel;
    };
    std::vector<PreRow> pre;
    pre.reserve(p.rows().size());
    for (const auto& c : p.rows()) {
      PreRow r;
      r.rel = c.rel;
      r.rhs = c.rhs;
      for (const auto& t : c.terms) {
        if (sgn(t.coef) == 0) continue;
        int col = col_of_var_[t.var];
        r.cols.emplace_back(col, t.coef);
        if (!p.var_nonneg(t.var)) r.cols.emplace_back(col + 1, -t.coef);
      }
      if (sgn(r.rhs) < 0) {
        r.rhs = -r.rhs;
        for (auto& cc : r.cols) cc.second = -cc.second;
        if (r.rel == Rel::Le)
          r.rel = Rel::Ge;
        else if (r.rel == Rel::Ge)
          r.rel = Rel::Le;
      }
      pre.push_back(std::move(r));
    }
    m_ = pre.size();
    slack_base_ = ncols_;
    std::size_t num_slacks = 0;
    for (const auto& r : pre)
      if (r.rel != Rel::Eq) ++num_slacks;
    art_base_ = slack_base_ + num_slacks;
    std::size_t num_art = 0;
    for (const auto& r : pre)
      if (r.rel != Rel::Le) ++num_art;
    total_cols_ = art_base_ + num_art;

    t_.assign(m_, RatVec(total_cols_ + 1, Rational(0)));
    basis_.assign(m_, -1);
    banned_.assign(total_cols_, false);
    std::size_t next_slack = slack_base_, next_art = art_base_;
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& r = pre[i];
      for (const auto& cc : r.cols) t_[i][cc.first] += cc.second;
      t_[i][total_cols_] = r.rhs;
      if (r.rel == Rel::Le) {
        t_[i][next_slack] = 1;
        basis_[i] = static_cast<int>(next_slack++);
      } else if (r.rel == Rel::Ge) {
        t_[i][next_slack] = -1;
        ++next_slack;
        t_[i][next_art] = 1;
        basis_[i] = static_cast<int>(next_art++);
      } else {
        t_[i][next_art] = 1;
        basis_[i] = static_cast<int>(next_art++);
      }
    }
  }

  Status run(bool want_phase2, Result* out) {
    // phase 1: maximize -(sum of artificials)
    if (art_base_ < total_cols_) {
      RatVec c(total_cols_, Rational(0));
      for (std::size_t j = art_base_; j < total_cols_; ++j) c[j] = -1;
      build_obj(c);
      optimize();
      if (sgn(objval_) != 0) return Status::Infeasible;
      purge_artificials();
    }
    if (!want_phase2) {
      if (out) extract(out);
      return Status::Optimal;
    }
    RatVec c(total_cols_, Rational(0));
    for (const auto& term : p_.objective()) {
      int col = col_of_var_[term.var];
      Rational v = p_.maximizing() ? term.coef : -term.coef;
      c[col] += v;
      if (!p_.var_nonneg(term.var)) c[col + 1] -= v;
    }
    build_obj(c);
    if (!optimize()) return Status::Unbounded;
    if (out) extract(out);
    return Status::Optimal;
  }

 private:
  void build_obj(const RatVec& c) {
    cost_ = c;
    obj_.assign(total_cols_ + 1, Rational(0));
    for (std::size_t j = 0; j < total_cols_; ++j) obj_[j] = c[j];
    objval_ = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      const Rational& cb = c[basis_[i]];
      if (sgn(cb) == 0) continue;
      for (std::size_t j = 0; j <= total_cols_; ++j)
        if (sgn(t_[i][j]) != 0) obj_[j] -= cb * t_[i][j];
      objval_ += cb * t_[i][total_cols_];
    }
    for (std::size_t i = 0; i < m_; ++i) obj_[basis_[i]] = 0;
  }

  // returns false on unboundedness
  bool optimize() {
    while (true) {
      int enter = -1;
      for (std::size_t j = 0; j < total_cols_; ++j) {
        if (banned_[j]) continue;
        if (sgn(obj_[j]) > 0) {
          enter = static_cast<int>(j);
          break;  // Bland: smallest improving index
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      Rational best;
      for (std::size_t i = 0; i < m_; ++i) {
        if (sgn(t_[i][enter]) <= 0) continue;
        Rational ratio = t_[i][total_cols_] / t_[i][enter];
        if (leave < 0 || cmp(ratio, best) < 0 ||
            (cmp(ratio, best) == 0 && basis_[i] < basis_[leave])) {
          leave = static_cast<int>(i);
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(static_cast<std::size_t>(leave), static_cast<std::size_t>(enter));
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    Rational inv = Rational(1) / t_[row][col];
    for (std::size_t j = 0; j <= total_cols_; ++j)
      if (sgn(t_[row][j]) != 0) t_[row][j] *= inv;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row || sgn(t_[i][col]) == 0) continue;
      Rational f = t_[i][col];
      for (std::size_t j = 0; j <= total_cols_; ++j)
        if (sgn(t_[row][j]) != 0) t_[i][j] -= f * t_[row][j];
    }
    if (sgn(obj_[col]) != 0) {
      Rational f = obj_[col];
      for (std::size_t j = 0; j <= total_cols_; ++j)
        if (sgn(t_[row][j]) != 0) obj_[j] -= f * t_[row][j];
      objval_ += f * t_[row][total_cols_];
    }
    std::size_t old = basis_[row];
    if (old >= art_base_) banned_[old] = true;
    basis_[row] = static_cast<int>(col);
  }

  void purge_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (static_cast<std::size_t>(basis_[i]) < art_base_) continue;
      // pivot the artificial out on any usable column
      int col = -1;
      for (std::size_t j = 0; j < art_base_; ++j) {
        if (banned_[j]) continue;
        if (sgn(t_[i][j]) != 0) {
          col = static_cast<int>(j);
          break;
        }
      }
      if (col >= 0) {
        pivot(i, static_cast<std::size_t>(col));
      } else {
        // redundant row: zero it out and retire its artificial
        banned_[basis_[i]] = true;
        redundant_.push_back(i);
      }
    }
    for (std::size_t j = art_base_; j < total_cols_; ++j) banned_[j] = true;
  }

  void extract(Result* out) const {
    RatVec col_val(total_cols_, Rational(0));
    for (std::size_t i = 0; i < m_; ++i) {
      bool skip = false;
      for (std::size_t r : redundant_)
        if (r == i) skip = true;
      if (!skip) col_val[basis_[i]] = t_[i][total_cols_];
    }
    out->x.assign(p_.num_vars(), Rational(0));
    for (int v = 0; v < p_.num_vars(); ++v) {
      int col = col_of_var_[v];
      out->x[v] = p_.var_nonneg(v) ? col_val[col] : col_val[col] - col_val[col + 1];
    }
    Rational val(0);
    for (const auto& term : p_.objective()) val += term.coef * out->x[term.var];
    out->value = val;
  }

  const Problem& p_;
  std::vector<int> col_of_var_;
  std::size_t ncols_ = 0, m_ = 0, slack_base_ = 0, art_base_ = 0, total_cols_ = 0;
  RatMat t_;
  RatVec obj_, cost_;
  Rational objval_;
  std::vector<int> basis_;
  std::vector<bool> banned_;
  std::vector<std::size_t> redundant_;
};

}  // namespace detail

inline Result solve(const Problem& p) {
  detail::Simplex s(p);
  Result r;
  r.status = s.run(true, &r);
  return r;
}

inline bool feasible(const Problem& p) {
  detail::Simplex s(p);
  Result r;
  return s.run(false, &r) == Status::Optimal;
}

}  // namespace convlab::lp
