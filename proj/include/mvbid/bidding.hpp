#pragma once

#include <optional>
#include <string_view>

#include "mvbid/types.hpp"

namespace mvbid {

/// Hyper-parameters of the optimal two-stage bid. Requires p + q > 0.
struct OptimalBidParams {
  double p = 0.0;
  double q = 0.0;
  double cpc_cap = 0.0;
};

/// Click bid (cvr + q C) / (p + q). Linear in cvr; passes through (p C, C)
/// and (-q C, 0). Not clamped, so it is also defined for cvr < 0.
/// Throws std::invalid_argument when p + q <= 0.
double optimal_click_bid(double cvr, const OptimalBidParams& params);

/// optimal_click_bid(opp.cvr) * opp.ctr.
double optimal_bid(const Opportunity& opp, const OptimalBidParams& params);

enum class BaselineVariant { cost_min, fb_control, fb_control_m };

std::string_view to_string(BaselineVariant v);

/// b0 is the controlled multiplier. cost_min and fb_control_m carry a cap on
/// the click bid, fb_control does not.
struct BaselineBidParams {
  double b0 = 0.0;
  std::optional<double> cap;
  BaselineVariant variant = BaselineVariant::cost_min;
};

/// Throws std::invalid_argument when the cap presence does not match the variant.
void validate(const BaselineBidParams& params);

/// cost_min, fb_control_m: min(b0 cvr, cap).  fb_control: b0.
double baseline_click_bid(double cvr, const BaselineBidParams& params);

double baseline_bid(const Opportunity& opp, const BaselineBidParams& params);

}  // namespace mvbid
