#pragma once

#include <cmath>
#include <cstdint>

namespace dynkin {

// splitmix64 output function (Steele, Lea, Flood).
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based splittable random stream.
///
/// A stream is identified by (seed, domain, index); draws walk a Weyl counter
/// through the splitmix64 output function, so stream i of a run never depends
/// on how many values other streams consumed. Estimators give path i its own
/// stream, which makes results independent of worker scheduling.
class RngStream {
 public:
  static RngStream make(std::uint64_t seed, std::uint64_t domain, std::uint64_t index) {
    std::uint64_t key = mix64(seed + 0x9e3779b97f4a7c15ULL);
    key = mix64(key ^ (domain * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
    key = mix64(key ^ (index * 0xda942042e4dd58b5ULL + 0x9e3779b97f4a7c15ULL));
    return RngStream(key);
  }

  std::uint64_t next_u64() {
    counter_ += 0x9e3779b97f4a7c15ULL;
    return mix64(counter_);
  }

  /// Uniform draw strictly inside (0,1); never returns an endpoint.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Exponential holding time, strictly positive.
  double exponential(double rate) { return -std::log(uniform01()) / rate; }

  /// Standard normal via Box-Muller; the second value of each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  explicit RngStream(std::uint64_t key) : counter_(key) {}

  std::uint64_t counter_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dynkin
