#pragma once

#include <cstdint>
#include <string_view>

namespace gustuq {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += kGoldenGamma;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a, used only to turn stream labels into 64-bit tags.
constexpr std::uint64_t hash_label(std::string_view label) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Counter-based random stream: the i-th draw is a pure function of
/// (seed, label, i), so results never depend on the order in which draws are
/// consumed and any prefix of a long run equals the corresponding short run.
class CounterStream {
 public:
  constexpr explicit CounterStream(std::uint64_t seed, std::string_view label = {}) noexcept
      : key_(splitmix64(seed ^ splitmix64(hash_label(label)))) {}

  constexpr std::uint64_t bits(std::uint64_t index) const noexcept {
    return splitmix64(key_ + index * kGoldenGamma);
  }

  /// Uniform on the open interval (0, 1), 53 bits of resolution.
  constexpr double uniform(std::uint64_t index) const noexcept {
    return (static_cast<double>(bits(index) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform on (-1, 1).
  constexpr double symmetric(std::uint64_t index) const noexcept { return 2.0 * uniform(index) - 1.0; }

  /// Child stream for a sub-task; distinct labels give unrelated streams.
  constexpr CounterStream child(std::string_view label) const noexcept { return CounterStream(key_, label); }

  constexpr std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
};

}  // namespace gustuq
