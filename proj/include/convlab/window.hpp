#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "convlab/errors.hpp"

namespace convlab {

/**
 * Finite ordered set of coordinate indices. Every desk-scale computation is
 * confined to a window; coordinates outside it are implicitly zero.
 */
class Window {
 public:
  explicit Window(std::vector<uint32_t> indices) : idx_(std::move(indices)) {
    std::sort(idx_.begin(), idx_.end());
    idx_.erase(std::unique(idx_.begin(), idx_.end()), idx_.end());
    if (idx_.empty()) throw WindowError("window must be non-empty");
  }
  Window(std::initializer_list<uint32_t> indices)
      : Window(std::vector<uint32_t>(indices)) {}

  /** Inclusive range [lo, hi]. */
  static Window range(uint32_t lo, uint32_t hi) {
    if (hi < lo) throw WindowError("window range is empty");
    std::vector<uint32_t> v;
    v.reserve(hi - lo + 1);
    for (uint32_t i = lo; i <= hi; ++i) v.push_back(i);
    return Window(std::move(v));
  }

  const std::vector<uint32_t>& indices() const { return idx_; }
  std::size_t size() const { return idx_.size(); }
  uint32_t max_index() const { return idx_.back(); }

  bool contains(uint32_t i) const {
    return std::binary_search(idx_.begin(), idx_.end(), i);
  }

  bool contains_all(const std::vector<uint32_t>& indices) const {
    for (uint32_t i : indices)
      if (!contains(i)) return false;
    return true;
  }

  Window merged(const Window& other) const {
    std::vector<uint32_t> v = idx_;
    v.insert(v.end(), other.idx_.begin(), other.idx_.end());
    return Window(std::move(v));
  }

  friend bool operator==(const Window& a, const Window& b) { return a.idx_ == b.idx_; }

 private:
  std::vector<uint32_t> idx_;
};

}  // namespace convlab
