#include "mfl/run_config.hpp"

#include <cmath>

#include <fmt/core.h>

#include "mfl/errors.hpp"

namespace mfl {

std::string_view algorithm_tag(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kDescentAscent:
      return "da";
    case Algorithm::kAveragedGradient:
      return "ag";
    case Algorithm::kAnchoredBestResponse:
      return "abr";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view tag) {
  if (tag == "da" || tag == "mfl-da") return Algorithm::kDescentAscent;
  if (tag == "ag" || tag == "mfl-ag") return Algorithm::kAveragedGradient;
  if (tag == "abr" || tag == "mfl-abr") return Algorithm::kAnchoredBestResponse;
  throw std::invalid_argument(fmt::format("unknown algorithm '{}' (expected da, ag or abr)", tag));
}

void RunConfig::validate(Algorithm algorithm) const {
  require(std::isfinite(temperature) && temperature >= 0.0,
          fmt::format("temperature must be >= 0, got {}", temperature));
  require(std::isfinite(step) && step > 0.0, fmt::format("step must be > 0, got {}", step));
  require(particles >= 1, fmt::format("particles must be >= 1, got {}", particles));
  require(epochs >= 0, fmt::format("epochs must be >= 0, got {}", epochs));
  require(std::isfinite(weight_exponent) && weight_exponent >= 0.0,
          fmt::format("weight exponent must be >= 0, got {}", weight_exponent));
  require(threads >= 0, "threads must be >= 0");
  require(history_cap >= 1, "history cap must be >= 1");
  if (init_mu) require(init_mu->size() == static_cast<std::size_t>(particles),
                       "initial mu particles do not match the particle count");
  if (init_nu) require(init_nu->size() == static_cast<std::size_t>(particles),
                       "initial nu particles do not match the particle count");
  if (algorithm == Algorithm::kAnchoredBestResponse) {
    require(abr.outer >= 1, fmt::format("ABR outer iterations must be >= 1, got {}", abr.outer));
    require(abr.inner >= 1, fmt::format("ABR inner iterations must be >= 1, got {}", abr.inner));
    require(abr.mix > 0.0 && abr.mix <= 1.0,
            fmt::format("ABR mixing rate must lie in (0, 1], got {}", abr.mix));
    require(std::floor(abr.mix * particles) >= 1.0,
            fmt::format("ABR mixing rate {} replaces no particle out of {}", abr.mix, particles));
  }
  if (algorithm == Algorithm::kAveragedGradient && ag_mode == AgMode::kHistory) {
    require(epochs + 1 <= history_cap,
            fmt::format("history mode would retain {} snapshots, above the cap of {}; "
                        "raise history_cap or use rolling mode", epochs + 1, history_cap));
  }
}

}  // namespace mfl
