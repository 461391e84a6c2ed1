#pragma once

#include <cstdint>

namespace rcthresh {

/// Identifies one logical random stream within a larger computation.
/// Distinct ids yield statistically independent sequences; the same
/// (seed, id) pair reproduces the same sequence regardless of how the
/// surrounding work is ordered or parallelized.
struct StreamId {
  std::uint32_t context = 0;
  std::uint32_t n_index = 0;
  std::uint32_t grid_index = 0;
  std::uint64_t trial_index = 0;
};

struct RngStream {
  std::uint64_t seed = 0;
  StreamId id;

  RngStream with_trial(std::uint64_t trial) const {
    RngStream s{*this};
    s.id.trial_index = trial;
    return s;
  }

  RngStream with_point(std::uint32_t n_index, std::uint32_t grid_index) const {
    RngStream s{*this};
    s.id.n_index = n_index;
    s.id.grid_index = grid_index;
    return s;
  }
};

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t absorb(std::uint64_t h, std::uint64_t v) {
  return mix64((h + kGolden) ^ (v * 0x2545f4914f6cdd1dULL));
}

}  // namespace detail

/// Deterministic counter-based uniform generator over one stream.
/// Integer outputs are exact on every platform; floating-point variates
/// are built from them with IEEE-exact arithmetic only.
class RandomSequence {
 public:
  explicit RandomSequence(const RngStream& stream) : state_(stream_key(stream)) {}

  std::uint64_t next_u64() {
    state_ += detail::kGolden;
    return detail::mix64(state_);
  }

  /// Uniform on (0, 1]; never returns 0.
  double next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal. Box-Muller pairs, drawn eagerly; the mate is cached.
  double next_normal();

  static std::uint64_t stream_key(const RngStream& s) {
    std::uint64_t h = detail::mix64(s.seed);
    h = detail::absorb(h, s.id.context);
    h = detail::absorb(h, s.id.n_index);
    h = detail::absorb(h, s.id.grid_index);
    h = detail::absorb(h, s.id.trial_index);
    return h;
  }

 private:
  std::uint64_t state_;
  double pending_normal_ = 0.0;
  bool has_pending_ = false;
};

}  // namespace rcthresh
