#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace lesionbox {

/// Deterministic random stream used by the phantom generator. The seed ->
/// value mapping is part of the fixture contract, so the generator is pinned
/// to the standard mt19937_64 engine with explicit output mappings instead
/// of platform-dependent std distributions:
///   uniform():          top 53 bits of next()  * 2^-53            in [0,1)
///   uniform(lo,hi):     lo + uniform() * (hi - lo)
///   uniform_int(n):     next() % n
///   gaussian():         Box-Muller from two uniform() draws
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform() {
    return double(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  std::uint64_t uniform_int(std::uint64_t n) { return next() % n; }

  double gaussian() {
    const double u1 = std::max(uniform(), 1e-300);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

private:
  std::mt19937_64 engine_;
};

} // namespace lesionbox
