#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace zrplab {

/// Stream tags used when deriving independent generators from one seed.
enum class StreamTag : std::uint64_t {
  init_site = 1,   // one uniform per site at initialization
  event_race = 2,  // the exponential race
  site_clock = 3,  // per-site Poisson clocks
};

/// splitmix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives a 64-bit key from (seed, replica, tag, index). Distinct tuples give
/// unrelated keys; this is the documented replica splitting function.
constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t replica, StreamTag tag,
                                   std::uint64_t index = 0) noexcept {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ replica);
  h = mix64(h ^ static_cast<std::uint64_t>(tag));
  return mix64(h ^ index);
}

/// 53-bit uniform in [0, 1).
constexpr double to_unit(std::uint64_t x) noexcept {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// Small counter-based generator for site-keyed streams.
class SplitMix64 {
 public:
  constexpr explicit SplitMix64(std::uint64_t state = 0) noexcept : state_(state) {}

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() noexcept { return to_unit(next()); }
  double exponential() noexcept { return -std::log(1.0 - uniform()); }

 private:
  std::uint64_t state_;
};

/// The uniform that initializes `site` of replica `replica`. Keyed by site so
/// windows of different sizes agree on their overlap.
inline double site_uniform(std::uint64_t seed, std::uint64_t replica, std::int64_t site) noexcept {
  return to_unit(derive_key(seed, replica, StreamTag::init_site, static_cast<std::uint64_t>(site)));
}

/// Seeded event stream of one replica. Identical (seed, replica, salt)
/// reproduces the identical sequence of draws.
class ClockStream {
 public:
  ClockStream() : ClockStream(0, 0) {}
  ClockStream(std::uint64_t seed, std::uint64_t replica, std::uint64_t salt = 0)
      : seed_(seed),
        replica_(replica),
        engine_(derive_key(seed, replica, StreamTag::event_race, salt)) {}

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t replica() const noexcept { return replica_; }
  [[nodiscard]] std::uint64_t draws() const noexcept { return draws_; }

  std::uint64_t next_u64() {
    ++draws_;
    return engine_();
  }
  double uniform() { return to_unit(next_u64()); }
  double exponential(double rate) { return -std::log(1.0 - uniform()) / rate; }
  /// Uniform index in [0, n) by multiply-shift.
  std::size_t index(std::size_t n) {
    __extension__ using wide = unsigned __int128;
    return static_cast<std::size_t>((static_cast<wide>(next_u64()) * n) >> 64);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t replica_;
  std::uint64_t draws_ = 0;
  std::mt19937_64 engine_;
};

}  // namespace zrplab
