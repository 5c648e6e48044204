#ifndef STP_RNG_HPP
#define STP_RNG_HPP

#include <cstdint>
#include <random>

namespace stp {

using Rng = std::mt19937_64;

// Uniform on the open interval (0,1) from the top 53 bits. Spelled out instead of
// std::uniform_real_distribution so that draws are identical across standard libraries.
inline double uniform_open01(Rng& rng)
{
  for (;;) {
    const double x = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (x > 0.0) return x;
  }
}

// Uniform integer in [0, n). Rejection sampling keeps it unbiased and portable.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n)
{
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  for (;;) {
    const std::uint64_t x = rng();
    if (x < limit) return x % n;
  }
}

template <class It>
void portable_shuffle(It first, It last, Rng& rng)
{
  const auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) {
    const auto k = uniform_below(rng, i);
    std::swap(first[i - 1], first[k]);
  }
}

// Decorrelated child seed for an independent stream.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace stp

#endif  // STP_RNG_HPP
