#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace eegbench {

using Rng = std::mt19937_64;

// splitmix64 finalizer; stable across platforms, unlike std::hash.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Order-sensitive seed derivation: derive_seed(master, "ds", 3, "cov") etc.
class SeedHasher {
 public:
  explicit constexpr SeedHasher(std::uint64_t master) : state_(mix64(master)) {}

  constexpr SeedHasher& add(std::uint64_t v) {
    state_ = mix64(state_ ^ mix64(v + 0x632be59bd9b4e019ULL));
    return *this;
  }
  constexpr SeedHasher& add(std::string_view s) { return add(fnv1a(s)); }
  constexpr SeedHasher& add(const char* s) { return add(std::string_view(s)); }
  template <typename T>
    requires std::is_integral_v<T>
  constexpr SeedHasher& add(T v) {
    return add(static_cast<std::uint64_t>(v));
  }

  constexpr std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_;
};

template <typename... Parts>
constexpr std::uint64_t derive_seed(std::uint64_t master, const Parts&... parts) {
  SeedHasher h(master);
  (h.add(parts), ...);
  return h.value();
}

}  // namespace eegbench
