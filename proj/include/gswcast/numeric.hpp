#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>

namespace gswcast {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  void merge(const CompensatedSum& other) noexcept {
    add(other.sum_);
    add(other.comp_);
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent randomness streams derived from one seed.
enum class Stream : std::uint64_t {
  Gsw = 0x67737773616d706cULL,
  Uniform = 0x756e69666f726d73ULL,
  Priority = 0x7072696f72697479ULL,
  Probe = 0x70726f6265726f77ULL,
  Synth = 0x73796e7468646174ULL,
};

/// Counter-based uniform draw in (0,1): a pure function of (seed, stream, id).
/// The result lies on the grid (k + 1/2)·2^-53, so it is never 0 or 1.
inline double keyed_uniform(std::uint64_t seed, Stream stream, std::uint64_t id) noexcept {
  const std::uint64_t key = mix64(seed ^ static_cast<std::uint64_t>(stream));
  const std::uint64_t h = mix64(key + id * 0x9E3779B97F4A7C15ULL);
  return (static_cast<double>(h >> 11) + 0.5) * 0x1p-53;
}

/// Seed of the `trial`-th Monte-Carlo repetition under `master`.
constexpr std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) noexcept {
  return mix64(master ^ mix64(trial + 0x5bd1e995ULL));
}

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace gswcast
