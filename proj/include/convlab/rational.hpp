#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "convlab/errors.hpp"

namespace convlab {

/** Exact rational scalar. All polyhedral computation runs on these. */
using Rational = mpq_class;

using RatVec = std::vector<Rational>;
using RatMat = std::vector<RatVec>;

inline Rational rat(long num, long den = 1) {
  if (den == 0) throw Error("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

/** Parses "p/q" or "p" (optionally signed). */
inline Rational parse_rational(const std::string& text) {
  std::string s;
  s.reserve(text.size());
  for (char c : text) {
    if (c != ' ' && c != '\t') s.push_back(c);
  }
  if (s.empty()) throw Error("empty rational literal");
  try {
    Rational q(s);
    if (q.get_den() == 0) throw Error("rational with zero denominator: " + text);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw Error("malformed rational literal: " + text);
  }
}

/** Canonical "p/q" (or "p" for integers) rendering used in all file formats. */
inline std::string format_rational(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

/** If q >= 0 is the square of a rational, stores the nonnegative root and returns true. */
inline bool rational_sqrt(const Rational& q, Rational* root) {
  if (sgn(q) < 0) return false;
  if (sgn(q) == 0) {
    if (root) *root = 0;
    return true;
  }
  const mpz_class& num = q.get_num();
  const mpz_class& den = q.get_den();
  if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
    return false;
  if (root) {
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
    *root = Rational(rn, rd);
    root->canonicalize();
  }
  return true;
}

}  // namespace convlab
