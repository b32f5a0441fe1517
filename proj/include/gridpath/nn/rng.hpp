#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "gridpath/common.hpp"

namespace gridpath::nn {

// Seeded random stream with hand-rolled distributions so that every draw is
// reproducible bit-for-bit regardless of the standard library in use.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  RngStream(std::uint64_t root, std::string_view name)
      : engine_(substream_seed(root, name)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1]; safe to feed into log().
  double uniform01_open() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Integer in [lo, hi] inclusive.
  long uniform_int(long lo, long hi) {
    return lo + static_cast<long>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Box-Muller; consumes exactly two engine draws per call.
  double normal(double mean = 0.0, double sd = 1.0) {
    double u1 = uniform01_open();
    double u2 = uniform01();
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    return mean + sd * z;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gridpath::nn
