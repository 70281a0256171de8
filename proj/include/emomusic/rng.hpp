#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace emomusic {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent stream seeds from a global
// seed plus job coordinates so that parallel and serial runs agree.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> coords) {
  std::uint64_t h = mix_seed(seed);
  for (auto c : coords) h = mix_seed(h ^ mix_seed(c + 0x632BE59BD9B4E019ULL));
  return h;
}

// Unbiased fair coin from the top bit; std::bernoulli_distribution is not
// specified bit-for-bit across standard libraries.
inline bool fair_coin(Rng& rng) { return (rng() >> 63) != 0; }

// Fisher-Yates with an explicit draw so results do not depend on the
// standard library's std::shuffle implementation.
template <class Vec>
void shuffle_in_place(Vec& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    using std::swap;
    swap(v[i - 1], v[j]);
  }
}

}  // namespace emomusic
