#pragma once

#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace convlab {

/** Worker count: CONVLAB_THREADS when set, machine parallelism otherwise. */
inline unsigned thread_count() {
  if (const char* env = std::getenv("CONVLAB_THREADS")) {
    long v = std::atol(env);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/**
 * Evaluates fn(i) for i in [lo, hi) across workers; results come back in
 * index order, so reductions downstream stay deterministic.
 */
template <class T, class F>
std::vector<T> parallel_map_range(long lo, long hi, F fn) {
  const long count = hi - lo;
  std::vector<T> out;
  if (count <= 0) return out;
  out.resize(static_cast<std::size_t>(count));
  unsigned workers = thread_count();
  if (workers <= 1 || count == 1) {
    for (long i = lo; i < hi; ++i) out[i - lo] = fn(i);
    return out;
  }
  if (static_cast<long>(workers) > count) workers = static_cast<unsigned>(count);
  std::vector<std::thread> threads;
  std::exception_ptr first_error;
  std::mutex err_mu;
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&, w]() {
      try {
        for (long i = lo + w; i < hi; i += workers) out[i - lo] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace convlab
