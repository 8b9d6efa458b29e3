#pragma once

#include <cmath>
#include <cstdint>

namespace ivph {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
//! Derive an independent sub-seed from (seed, tag1, tag2).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag1, std::uint64_t tag2 = 0) {
  return splitmix64(splitmix64(seed ^ (tag1 * 0xd1342543de82ef95ULL)) ^
                    (tag2 * 0x2545f4914f6cdd1dULL));
}

}  // namespace detail

//! Counter-based splittable RNG. A stream is fully determined by
//! (seed, stream ids), so draws are reproducible and independent of
//! thread scheduling: give each replication / resample / row its own
//! stream instead of sharing a sequential generator.
class SplitRng {
public:
  explicit SplitRng(std::uint64_t seed, std::uint64_t stream1 = 0, std::uint64_t stream2 = 0) {
    std::uint64_t k = detail::splitmix64(seed ^ 0x5851f42d4c957f2dULL);
    k = detail::splitmix64(k ^ stream1);
    k = detail::splitmix64(k ^ (stream2 * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL));
    state_ = k;
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  //! Uniform on (0,1): 53-bit mantissa, never exactly 0 or 1.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }

  //! Standard normal via Box-Muller (explicit formula keeps draws
  //! bit-reproducible across standard library implementations).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  //! Exponential with the given rate.
  double exponential(double rate) { return -std::log(uniform()) / rate; }

  int bernoulli(double p) { return uniform() < p ? 1 : 0; }

  //! Index uniform on {0, ..., n-1}.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

private:
  std::uint64_t state_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace ivph
