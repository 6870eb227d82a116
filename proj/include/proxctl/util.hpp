#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace proxctl {

//! SplitMix64 finalizer, used to derive independent seeds from a master seed
//! and a stream counter so that parallel draws stay reproducible.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x51ED2701ULL));
}

//! Linear interpolation sample quantile (the common "type 7" definition).
inline double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

//! Upper empirical quantile via the ceil(level * m) order statistic, the
//! conservative choice for critical values from a finite set of draws.
inline double order_statistic_quantile(std::vector<double> values, double level) {
  if (values.empty()) throw std::invalid_argument("order_statistic_quantile: empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size();
  std::size_t k = static_cast<std::size_t>(std::ceil(level * static_cast<double>(m)));
  k = std::min(std::max<std::size_t>(k, 1), m);
  return values[k - 1];
}

inline double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty sample");
  return quantile(std::move(values), 0.5);
}

//! Runs fn(i) for i in [0, count) across worker threads. Results must be
//! written to per-index slots by the caller; the schedule never changes the
//! output because each index owns its slot.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  unsigned hw = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("PROXCTL_THREADS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed > 0) hw = static_cast<unsigned>(parsed);
  }
  if (hw <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(hw, count));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

//! Formats a double with 17 significant digits, enough for an exact
//! binary round trip through decimal text.
inline std::string format_full(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return std::string(buf);
}

}  // namespace proxctl
