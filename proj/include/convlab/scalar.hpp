#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "convlab/rational.hpp"

namespace convlab {

/**
 * Scalar value arising from norm and distance computations.
 *
 * Polyhedral quantities stay exact rationals. Euclidean quantities are carried
 * exactly as signed square roots of rationals for as long as the algebra
 * permits (sums of commensurable roots stay exact); anything else degrades to
 * binary64 and is flagged inexact. Infinities encode the empty-set
 * conventions d(x, emptyset) = +inf and sup over emptyset = -inf.
 */
class Scalar {
 public:
  enum class Kind { Exact, Root, Approx, PosInf, NegInf };

  Scalar() : kind_(Kind::Exact), q_(0) {}

  static Scalar exact(Rational v) {
    Scalar s;
    s.kind_ = Kind::Exact;
    s.q_ = std::move(v);
    return s;
  }
  static Scalar exact(long v) { return exact(Rational(v)); }

  /** sign * sqrt(radicand); collapses to Exact when the root is rational. */
  static Scalar root_of(const Rational& radicand, int sign_hint = 1) {
    if (sgn(radicand) < 0) throw Error("root_of: negative radicand");
    if (sgn(radicand) == 0 || sign_hint == 0) return exact(Rational(0));
    Rational r;
    if (rational_sqrt(radicand, &r)) return exact(sign_hint > 0 ? r : Rational(-r));
    Scalar s;
    s.kind_ = Kind::Root;
    s.q_ = radicand;
    s.sign_ = sign_hint > 0 ? 1 : -1;
    return s;
  }

  static Scalar approx(double v) {
    Scalar s;
    s.kind_ = Kind::Approx;
    s.d_ = v;
    return s;
  }
  static Scalar pos_inf() {
    Scalar s;
    s.kind_ = Kind::PosInf;
    return s;
  }
  static Scalar neg_inf() {
    Scalar s;
    s.kind_ = Kind::NegInf;
    return s;
  }

  Kind kind() const { return kind_; }
  bool is_exact() const { return kind_ == Kind::Exact || kind_ == Kind::Root; }
  bool is_finite() const { return kind_ != Kind::PosInf && kind_ != Kind::NegInf; }
  bool is_rational() const { return kind_ == Kind::Exact; }

  const Rational& rational() const {
    if (kind_ != Kind::Exact) throw Error("scalar is not rational: " + str());
    return q_;
  }

  /** Exact square as a rational; defined for the two exact kinds only. */
  Rational square() const {
    switch (kind_) {
      case Kind::Exact:
        return q_ * q_;
      case Kind::Root:
        return q_;
      default:
        throw Error("square of non-exact scalar: " + str());
    }
  }

  int sign() const {
    switch (kind_) {
      case Kind::Exact:
        return sgn(q_);
      case Kind::Root:
        return sign_;
      case Kind::Approx:
        return d_ > 0 ? 1 : (d_ < 0 ? -1 : 0);
      case Kind::PosInf:
        return 1;
      case Kind::NegInf:
        return -1;
    }
    return 0;
  }

  double to_double() const {
    switch (kind_) {
      case Kind::Exact:
        return q_.get_d();
      case Kind::Root:
        return sign_ * std::sqrt(q_.get_d());
      case Kind::Approx:
        return d_;
      case Kind::PosInf:
        return std::numeric_limits<double>::infinity();
      case Kind::NegInf:
        return -std::numeric_limits<double>::infinity();
    }
    return 0.0;
  }

  /** Three-way comparison; exact whenever both operands are exact. */
  static int compare(const Scalar& a, const Scalar& b) {
    if (a.kind_ == Kind::PosInf) return b.kind_ == Kind::PosInf ? 0 : 1;
    if (b.kind_ == Kind::PosInf) return -1;
    if (a.kind_ == Kind::NegInf) return b.kind_ == Kind::NegInf ? 0 : -1;
    if (b.kind_ == Kind::NegInf) return 1;
    if (a.is_exact() && b.is_exact()) {
      int sa = a.sign(), sb = b.sign();
      if (sa != sb) return sa < sb ? -1 : 1;
      if (sa == 0) return 0;
      int c = cmp(a.square(), b.square());
      return sa > 0 ? c : -c;
    }
    double da = a.to_double(), db = b.to_double();
    if (da < db) return -1;
    if (da > db) return 1;
    return 0;
  }

  friend bool operator<(const Scalar& a, const Scalar& b) { return compare(a, b) < 0; }
  friend bool operator<=(const Scalar& a, const Scalar& b) { return compare(a, b) <= 0; }
  friend bool operator>(const Scalar& a, const Scalar& b) { return compare(a, b) > 0; }
  friend bool operator>=(const Scalar& a, const Scalar& b) { return compare(a, b) >= 0; }
  friend bool operator==(const Scalar& a, const Scalar& b) { return compare(a, b) == 0; }
  friend bool operator!=(const Scalar& a, const Scalar& b) { return compare(a, b) != 0; }

  Scalar operator-() const {
    switch (kind_) {
      case Kind::Exact:
        return exact(Rational(-q_));
      case Kind::Root: {
        Scalar s = *this;
        s.sign_ = -s.sign_;
        return s;
      }
      case Kind::Approx:
        return approx(-d_);
      case Kind::PosInf:
        return neg_inf();
      case Kind::NegInf:
        return pos_inf();
    }
    return Scalar();
  }

  Scalar abs() const { return sign() < 0 ? -*this : *this; }

  friend Scalar operator+(const Scalar& a, const Scalar& b) {
    if (!a.is_finite() || !b.is_finite()) {
      if ((a.kind_ == Kind::PosInf && b.kind_ == Kind::NegInf) ||
          (a.kind_ == Kind::NegInf && b.kind_ == Kind::PosInf))
        throw Error("inf - inf");
      return a.is_finite() ? b : a;
    }
    if (a.kind_ == Kind::Approx || b.kind_ == Kind::Approx)
      return approx(a.to_double() + b.to_double());
    if (a.kind_ == Kind::Exact && b.kind_ == Kind::Exact) return exact(a.q_ + b.q_);
    if (a.kind_ == Kind::Exact) return b + a;
    // a is Root
    if (b.kind_ == Kind::Exact) {
      if (sgn(b.q_) == 0) return a;
      return approx(a.to_double() + b.to_double());
    }
    // Root + Root: exact when the radicands are commensurable
    Rational cross;
    if (rational_sqrt(a.q_ * b.q_, &cross)) {
      // (s1*sqrt(m1) + s2*sqrt(m2))^2 = m1 + m2 + 2*s1*s2*sqrt(m1*m2)
      Rational sq = a.q_ + b.q_ + Rational(2 * a.sign_ * b.sign_) * cross;
      int result_sign;
      if (a.sign_ == b.sign_) {
        result_sign = a.sign_;
      } else {
        int c = cmp(a.q_, b.q_);
        result_sign = c == 0 ? 0 : (c > 0 ? a.sign_ : b.sign_);
      }
      return root_of(sq, result_sign);
    }
    return approx(a.to_double() + b.to_double());
  }

  friend Scalar operator-(const Scalar& a, const Scalar& b) { return a + (-b); }

  friend Scalar operator*(const Scalar& a, const Scalar& b) {
    if (!a.is_finite() || !b.is_finite()) {
      int s = a.sign() * b.sign();
      if (s == 0) throw Error("0 * inf");
      return s > 0 ? pos_inf() : neg_inf();
    }
    if (a.kind_ == Kind::Approx || b.kind_ == Kind::Approx)
      return approx(a.to_double() * b.to_double());
    if (a.kind_ == Kind::Exact && b.kind_ == Kind::Exact) return exact(a.q_ * b.q_);
    if (a.kind_ == Kind::Exact) return b * a;
    if (b.kind_ == Kind::Exact) {
      if (sgn(b.q_) == 0) return exact(Rational(0));
      return root_of(a.q_ * b.q_ * b.q_, a.sign_ * sgn(b.q_));
    }
    return root_of(a.q_ * b.q_, a.sign_ * b.sign_);
  }

  friend Scalar operator/(const Scalar& a, const Scalar& b) {
    if (b.sign() == 0) throw Error("scalar division by zero");
    if (!b.is_finite()) {
      if (!a.is_finite()) throw Error("inf / inf");
      return exact(Rational(0));
    }
    if (!a.is_finite()) return b.sign() > 0 ? a : -a;
    if (a.kind_ == Kind::Approx || b.kind_ == Kind::Approx)
      return approx(a.to_double() / b.to_double());
    if (b.kind_ == Kind::Exact) return a * exact(Rational(1) / b.q_);
    // divide by sign*sqrt(m): multiply by sign*sqrt(1/m)
    return a * root_of(Rational(1) / b.q_, b.sign_);
  }

  std::string str() const {
    switch (kind_) {
      case Kind::Exact:
        return format_rational(q_);
      case Kind::Root:
      case Kind::Approx: {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", to_double());
        return buf;
      }
      case Kind::PosInf:
        return "inf";
      case Kind::NegInf:
        return "-inf";
    }
    return "";
  }

 private:
  Kind kind_;
  Rational q_;  // Exact: value; Root: radicand (positive, not a perfect square)
  int sign_ = 1;
  double d_ = 0.0;
};

inline Scalar scalar_min(const Scalar& a, const Scalar& b) { return a <= b ? a : b; }
inline Scalar scalar_max(const Scalar& a, const Scalar& b) { return a >= b ? a : b; }

/** sqrt of a nonnegative scalar. */
inline Scalar scalar_sqrt(const Scalar& v) {
  switch (v.kind()) {
    case Scalar::Kind::Exact:
      return Scalar::root_of(v.rational());
    case Scalar::Kind::PosInf:
      return v;
    default:
      if (v.sign() < 0) throw Error("sqrt of negative scalar");
      return Scalar::approx(std::sqrt(v.to_double()));
  }
}

}  // namespace convlab
