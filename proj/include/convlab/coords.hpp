#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "convlab/rational.hpp"
#include "convlab/window.hpp"

namespace convlab {

/**
 * Finitely-supported exact-rational coordinate map. Entries are kept sorted
 * by index with zeros dropped, so equality is structural. Immutable after
 * construction; the mutating-looking operations return fresh values.
 */
template <class Tag>
class CoordMap {
 public:
  using Entry = std::pair<uint32_t, Rational>;

  CoordMap() = default;

  static CoordMap unit(uint32_t i) { return CoordMap({{i, Rational(1)}}); }

  CoordMap(std::initializer_list<Entry> entries)
      : CoordMap(std::vector<Entry>(entries)) {}

  explicit CoordMap(std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.first < b.first; });
    for (std::size_t i = 0; i + 1 < entries.size(); ++i)
      if (entries[i].first == entries[i + 1].first)
        throw Error("duplicate coordinate index " + std::to_string(entries[i].first));
    for (auto& e : entries)
      if (sgn(e.second) != 0) entries_.push_back(std::move(e));
  }

  const std::vector<Entry>& entries() const { return entries_; }
  bool zero() const { return entries_.empty(); }

  Rational at(uint32_t i) const {
    auto it = std::lower_bound(
        entries_.begin(), entries_.end(), i,
        [](const Entry& e, uint32_t key) { return e.first < key; });
    if (it != entries_.end() && it->first == i) return it->second;
    return Rational(0);
  }

  std::vector<uint32_t> support() const {
    std::vector<uint32_t> s;
    s.reserve(entries_.size());
    for (const auto& e : entries_) s.push_back(e.first);
    return s;
  }

  CoordMap plus(const CoordMap& other) const {
    std::vector<Entry> out;
    out.reserve(entries_.size() + other.entries_.size());
    auto a = entries_.begin(), b = other.entries_.begin();
    while (a != entries_.end() || b != other.entries_.end()) {
      if (b == other.entries_.end() || (a != entries_.end() && a->first < b->first)) {
        out.push_back(*a++);
      } else if (a == entries_.end() || b->first < a->first) {
        out.push_back(*b++);
      } else {
        Rational v = a->second + b->second;
        if (sgn(v) != 0) out.emplace_back(a->first, std::move(v));
        ++a;
        ++b;
      }
    }
    CoordMap r;
    r.entries_ = std::move(out);
    return r;
  }

  CoordMap scaled(const Rational& c) const {
    CoordMap r;
    if (sgn(c) == 0) return r;
    r.entries_ = entries_;
    for (auto& e : r.entries_) e.second *= c;
    return r;
  }

  CoordMap negated() const { return scaled(Rational(-1)); }
  CoordMap minus(const CoordMap& other) const { return plus(other.negated()); }

  friend bool operator==(const CoordMap& a, const CoordMap& b) {
    return a.entries_ == b.entries_;
  }
  friend bool operator!=(const CoordMap& a, const CoordMap& b) { return !(a == b); }

 private:
  std::vector<Entry> entries_;
};

struct VectorTag {};
struct FunctionalTag {};

using Vector = CoordMap<VectorTag>;
using Functional = CoordMap<FunctionalTag>;

/** Bilinear pairing <f, x> = sum_i f_i x_i over the common support. */
template <class TagA, class TagB>
Rational pairing(const CoordMap<TagA>& f, const CoordMap<TagB>& x) {
  Rational acc(0);
  auto a = f.entries().begin();
  auto b = x.entries().begin();
  while (a != f.entries().end() && b != x.entries().end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      acc += a->second * b->second;
      ++a;
      ++b;
    }
  }
  return acc;
}

/** Reinterprets a vector as a functional (desk-scale duality) and back. */
inline Functional as_functional(const Vector& v) {
  std::vector<Functional::Entry> e(v.entries().begin(), v.entries().end());
  return Functional(std::move(e));
}
inline Vector as_vector(const Functional& f) {
  std::vector<Vector::Entry> e(f.entries().begin(), f.entries().end());
  return Vector(std::move(e));
}

template <class Tag>
void collect_support(const CoordMap<Tag>& m, std::vector<uint32_t>* out) {
  for (const auto& e : m.entries()) out->push_back(e.first);
}

inline std::vector<uint32_t> sorted_unique(std::vector<uint32_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

template <class Tag>
std::string coords_str(const CoordMap<Tag>& m) {
  std::string s = "{";
  bool first = true;
  for (const auto& e : m.entries()) {
    if (!first) s += ", ";
    first = false;
    s += std::to_string(e.first) + ": " + format_rational(e.second);
  }
  return s + "}";
}

}  // namespace convlab
