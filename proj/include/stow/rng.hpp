#ifndef STOW_RNG_HPP
#define STOW_RNG_HPP

#include <cstdint>
#include <random>

namespace stow {

// Deterministic RNG front-end. The engine is std::mt19937_64, whose output
// sequence is pinned by the language standard, so seeded runs reproduce
// bit-for-bit across platforms. Uniform conversion is done by hand because
// std::uniform_real_distribution is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  // uniform double in [0, 1)
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // uniform double in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in {lo, ..., hi} via rejection-free scaling
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(eng_() % span);
  }

  // standard normal via Box-Muller on hand-rolled uniforms
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// SplitMix64 mix step, used to derive independent substream seeds from a
// base seed plus a stream id without correlating the streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Substream ids used across the toolkit; fixed so artifacts reproduce.
namespace stream_id {
inline constexpr std::uint64_t demand = 0x0de11and;
inline constexpr std::uint64_t mask_scores = 0x5c07e5;
inline constexpr std::uint64_t policy = 0x9011c7;
inline constexpr std::uint64_t tree = 0x73ee;
inline constexpr std::uint64_t init = 0x1a171;
}  // namespace stream_id

}  // namespace stow

#endif
