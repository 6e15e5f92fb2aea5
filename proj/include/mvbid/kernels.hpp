#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mvbid/types.hpp"

namespace mvbid {

enum class Execution { serial, parallel };

/// Structure-of-arrays view of the dual constraints
///   wp_i * p + (wp_i - ctr_i * C) * q + r_i >= v_i.
struct DualTerms {
  double budget = 0.0;
  std::vector<double> wp;
  std::vector<double> cpc_slope;  // wp_i - ctr_i * C
  std::vector<double> value;      // ctr_i * cvr_i

  static DualTerms from(const BidLog& log, const CampaignSpec& spec);
  std::size_t size() const { return wp.size(); }
};

inline double hinge(double value, double wp, double slope, double p, double q) {
  double r = value - wp * p - slope * q;
  return r > 0.0 ? r : 0.0;
}

/// Reference fold: left-to-right sum of max(0, v_i - wp_i p - slope_i q).
double hinge_sum_serial(const DualTerms& terms, double p, double q);

/// Fixed-size chunks summed in parallel, partials combined pairwise. The
/// result does not depend on the thread count.
double hinge_sum_parallel(const DualTerms& terms, double p, double q);

inline constexpr std::size_t kReductionChunk = 4096;

/// Pairwise (cascade) sum in a fixed order.
double pairwise_sum(std::span<const double> xs);

}  // namespace mvbid
