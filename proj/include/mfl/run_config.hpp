#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "mfl/particles.hpp"

namespace mfl {

enum class Algorithm { kDescentAscent, kAveragedGradient, kAnchoredBestResponse };

std::string_view algorithm_tag(Algorithm algorithm);  // "da", "ag", "abr"
Algorithm parse_algorithm(std::string_view tag);

// How MFL-AG keeps the history of past iterates.
enum class AgMode {
  // Two size-N reservoirs refreshed by resampling; bilinear objectives only.
  kRolling,
  // Every snapshot is retained and the drift is re-weighted each step.
  kHistory,
};

struct AbrConfig {
  int outer = 50;
  int inner = 20;
  double mix = 0.15;
  bool warm_start = true;
};

struct RunConfig {
  double temperature = 0.01;  // lambda
  double step = 0.3;          // eta
  int particles = 1000;       // N
  int epochs = 1000;          // K, number of updates for MFL-DA / MFL-AG
  std::uint64_t seed = 0;
  double weight_exponent = 1.0;  // r
  // Disables the sqrt(2 lambda eta) xi term; used by deterministic tests.
  bool noise = true;
  int threads = 1;  // 0 = hardware concurrency
  AgMode ag_mode = AgMode::kRolling;
  // Upper bound on retained snapshots in history mode.
  int history_cap = 5000;
  AbrConfig abr;
  // Initial particles; sampled from the base measures when absent.
  std::optional<ParticleSet> init_mu;
  std::optional<ParticleSet> init_nu;

  // Throws std::invalid_argument on violated invariants.
  void validate(Algorithm algorithm) const;
};

}  // namespace mfl
