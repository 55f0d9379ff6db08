#pragma once

#include <cmath>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace lax {

// Error kinds used across the library. Each maps to one failure mode of the
// public operations; everything derives from std::runtime_error except
// invalid_argument_error, which keeps the std::invalid_argument lineage so
// generic callers can catch either family.
class invalid_argument_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class capability_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class degenerate_soliton_error : public invalid_argument_error {
 public:
  using invalid_argument_error::invalid_argument_error;
};

class box_too_small_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class step_size_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class divergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class degenerate_spectrum_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double sq(double v) { return v * v; }

// log(1 + e^a) without overflow for large |a|.
inline double log1pexp(double a) {
  return a > 0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
}

// Thread cap: LAX_SHORTCUTS_THREADS wins over hardware_concurrency.
inline unsigned thread_cap() {
  if (const char* env = std::getenv("LAX_SHORTCUTS_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Index-parallel loop with deterministic work assignment. Results must be
// written to preallocated, per-index slots; ordering of side effects is then
// independent of scheduling.
template <typename F>
void parallel_for(std::size_t count, F&& body) {
  unsigned nt = thread_cap();
  if (nt <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  nt = static_cast<unsigned>(std::min<std::size_t>(nt, count));
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (unsigned w = 0; w < nt; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += nt) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace lax
