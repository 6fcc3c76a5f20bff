#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "socsim/config.hpp"

namespace socsim {

// Independent random stream keyed by (master seed, agent, round, purpose). Streams are
// derived, never shared, so scheduling order cannot change any draw.
class Stream {
 public:
  Stream(std::uint64_t master, std::string_view agent, int round, std::string_view purpose) {
    const std::uint64_t a = fnv1a(agent);
    const std::uint64_t p = fnv1a(purpose);
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(round), static_cast<std::uint32_t>(p),
                      static_cast<std::uint32_t>(p >> 32)};
    engine_.seed(seq);
  }

  // Uniform in [0, 1) with 53 random bits; identical across standard libraries.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform index in [0, n).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

  // Index drawn proportionally to non-negative weights; falls back to 0 if all are zero.
  std::size_t weighted(const std::vector<double>& w) {
    double total = 0.0;
    for (double x : w) total += x;
    if (!(total > 0.0)) return 0;
    double r = uniform() * total;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] <= 0.0) continue;
      if (r < w[i]) return i;
      r -= w[i];
    }
    for (std::size_t i = w.size(); i-- > 0;)
      if (w[i] > 0.0) return i;
    return 0;
  }

 private:
  std::mt19937_64 engine_;
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace socsim
