#pragma once

#include <cmath>
#include <cstdint>

namespace steerkit {

/// Counter-based PRNG (splitmix64 output function). Every draw is a pure
/// function of (seed, counter), so streams can be derived and replayed
/// independently of call order or platform.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  /// Independent stream for worker i (restart index, resample index, ...).
  CounterRng derive(std::uint64_t stream) const {
    return CounterRng(mix(seed_ ^ mix(stream + 0x632be59bd9b4e019ULL)));
  }

  std::uint64_t next_u64() { return mix(seed_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform in the open interval (0, 1).
  double next_double() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; one spare value is cached.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = next_double();
    const double u2 = next_double();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 6.283185307179586476925286766559 * u2;
    spare_ = mag * std::sin(ang);
    has_spare_ = true;
    return mag * std::cos(ang);
  }

  /// Poisson draw by inversion, walking outward from the mode. Exact for
  /// any mean that fits a double; O(sqrt(mean)) expected steps.
  double next_poisson(double mean) {
    if (mean <= 0.0) return 0.0;
    const double u = next_double();
    const double m = std::floor(mean);
    // pmf at the mode, via logs to survive large means
    const double log_pm = m * std::log(mean) - mean - std::lgamma(m + 1.0);
    double pm = std::exp(log_pm);
    double acc = pm;
    if (u <= acc) return m;
    double lo = m, hi = m;            // explored interval
    double p_lo = pm, p_hi = pm;      // pmf at its ends
    const double steps_cap = 10.0 * std::sqrt(mean + 10.0) + 100.0;
    for (double step = 0; step < steps_cap; ++step) {
      if (lo > 0.0) {
        p_lo *= lo / mean;            // pmf(lo-1) = pmf(lo) * lo / mean
        lo -= 1.0;
        acc += p_lo;
        if (u <= acc) return lo;
      }
      p_hi *= mean / (hi + 1.0);      // pmf(hi+1) = pmf(hi) * mean/(hi+1)
      hi += 1.0;
      acc += p_hi;
      if (u <= acc) return hi;
    }
    return hi;  // u in the far tail (prob < 1e-20); clamp
  }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace steerkit
