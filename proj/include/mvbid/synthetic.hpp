#pragma once

#include <cstdint>
#include <vector>

#include "mvbid/types.hpp"

namespace mvbid {

struct BetaShape {
  double a = 1.0;
  double b = 1.0;
  double mean() const { return a / (a + b); }
  bool operator==(const BetaShape&) const = default;
};

/// Test-day distortion relative to the training day.
struct Drift {
  double wp_factor = 1.0;
  /// Per-step multipliers on the volume profile; empty means unchanged.
  std::vector<double> volume_factors;
  bool operator==(const Drift&) const = default;
};

enum class DayKind { train, test };

/// Generator for synthetic campaign-day logs. The number of steps is the
/// length of volume_profile and must divide 86400.
///
///   wp = wp_base * (ctr / mean_ctr)^wp_ctr_exponent * (cvr / mean_cvr)^wp_cvr_exponent
///        * exp(N(0, wp_noise_sigma))
///
/// with mean_ctr, mean_cvr the means of the beta shapes. Test days
/// additionally apply the drift.
struct SyntheticConfig {
  std::size_t n_opportunities = 0;
  std::vector<double> volume_profile;
  BetaShape ctr_shape;
  BetaShape cvr_shape;
  double wp_base = 1.0;
  double wp_ctr_exponent = 0.0;
  double wp_cvr_exponent = 0.0;  // optional in config files, 0 when absent
  double wp_noise_sigma = 0.0;
  Drift drift;
  std::uint64_t rng_seed = 0;

  bool operator==(const SyntheticConfig&) const = default;
};

/// Throws DataError on a degenerate or inconsistent config.
void validate(const SyntheticConfig& cfg);

/// Deterministic in (cfg, kind). Train and test days draw from independent
/// streams derived from rng_seed; ids run 1..n.
BidLog generate_log(const SyntheticConfig& cfg, DayKind kind = DayKind::train);

/// Volume profile actually used for a day (drift applied and renormalized).
std::vector<double> effective_profile(const SyntheticConfig& cfg, DayKind kind);

}  // namespace mvbid
