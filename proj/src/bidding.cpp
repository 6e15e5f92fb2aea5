#include "mvbid/bidding.hpp"

#include <algorithm>
#include <stdexcept>

namespace mvbid {

double optimal_click_bid(double cvr, const OptimalBidParams& params) {
  const double denom = params.p + params.q;
  if (!(denom > 0.0)) throw std::invalid_argument("optimal_click_bid: p + q must be positive");
  return (cvr + params.q * params.cpc_cap) / denom;
}

double optimal_bid(const Opportunity& opp, const OptimalBidParams& params) {
  return optimal_click_bid(opp.cvr, params) * opp.ctr;
}

std::string_view to_string(BaselineVariant v) {
  switch (v) {
    case BaselineVariant::cost_min: return "cost-min";
    case BaselineVariant::fb_control: return "fb-control";
    case BaselineVariant::fb_control_m: return "fb-control-m";
  }
  return "?";
}

void validate(const BaselineBidParams& params) {
  const bool wants_cap = params.variant != BaselineVariant::fb_control;
  if (wants_cap != params.cap.has_value())
    throw std::invalid_argument(std::string(to_string(params.variant)) +
                                (wants_cap ? " requires a cap" : " takes no cap"));
  if (params.cap && !(*params.cap > 0.0))
    throw std::invalid_argument("baseline cap must be positive");
}

double baseline_click_bid(double cvr, const BaselineBidParams& params) {
  if (params.variant == BaselineVariant::fb_control) return params.b0;
  const double raw = params.b0 * cvr;
  return params.cap ? std::min(raw, *params.cap) : raw;
}

double baseline_bid(const Opportunity& opp, const BaselineBidParams& params) {
  return baseline_click_bid(opp.cvr, params) * opp.ctr;
}

}  // namespace mvbid
