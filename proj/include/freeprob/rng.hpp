#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace freeprob {

// Counter-based random stream: value i is a pure function of (key, i), so
// parallel fills and reruns with the same seed are bitwise identical, and
// independent substreams come from key derivation instead of jump-ahead.
class SeedStream {
 public:
  explicit SeedStream(std::uint64_t key) : key_(key) {}

  static SeedStream derive(std::uint64_t seed, std::uint64_t stream) {
    return SeedStream(mix(seed ^ mix(stream * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL)));
  }

  std::uint64_t at(std::uint64_t i) const {
    return mix(key_ + (i + 1) * 0x9e3779b97f4a7c15ULL);
  }

  std::uint64_t next_u64() { return at(counter_++); }

  // uniform in [0,1) with 53 random bits
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double unit_at(std::uint64_t i) const {
    return static_cast<double>(at(i) >> 11) * 0x1.0p-53;
  }

  // standard normal pair (Box-Muller)
  std::pair<double, double> next_gaussian_pair() {
    double u1 = next_unit();
    double u2 = next_unit();
    return gaussian_from_units(u1, u2);
  }

  std::pair<double, double> gaussian_pair_at(std::uint64_t i) const {
    return gaussian_from_units(unit_at(2 * i), unit_at(2 * i + 1));
  }

  double next_gaussian() { return next_gaussian_pair().first; }

  // uniform integer in [0, n)
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

 private:
  static std::pair<double, double> gaussian_from_units(double u1, double u2) {
    // 1-u1 lies in (0,1], so the log is finite
    double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    double a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace freeprob
