#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace mfl {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key);
};

// Purpose tags keep streams for different uses disjoint even when they share
// (seed, epoch, index).
enum class StreamTag : std::uint32_t {
  kInitMu = 1,
  kInitNu,
  kNoiseMu,
  kNoiseNu,
  kInnerInitMu,
  kInnerInitNu,
  kInnerNoiseMu,
  kInnerNoiseNu,
  kReplaceMu,
  kReplaceNu,
  kOutputMu,
  kOutputNu,
  kPerturbation,
  kUser = 0xff,
};

// Sequential draws from one Philox stream identified by
// (seed, epoch, index, tag); the block counter advances per 128 bits drawn.
//
// Normals use the Box-Muller transform on two open-interval uniforms built
// from the top 53 bits of successive 64-bit words; both outputs of a pair
// are used in order.
class CounterStream {
 public:
  using result_type = std::uint64_t;

  CounterStream(std::uint64_t seed, std::uint64_t epoch, std::uint32_t index, StreamTag tag);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  // Unbiased integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  void refill();

  Philox4x32::Key key_;
  Philox4x32::Counter base_;
  std::uint32_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_words_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// SplitMix64 finalizer; used to derive child seeds.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);
// FNV-1a, for keying streams by a stable name.
std::uint64_t stable_hash(std::string_view text);

}  // namespace mfl
