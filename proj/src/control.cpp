#include "mvbid/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mvbid {

double pid_step(PidState& state, double reference, double measured, std::optional<double> weight) {
  double e = reference - measured;
  if (weight) e *= *weight;
  const double clamp = state.limits.integral_clamp;
  state.error_integral = std::clamp(state.error_integral + e, -clamp, clamp);
  const double derivative = e - state.previous_error;
  state.previous_error = e;
  const auto& g = state.gains;
  return g.kp * e + g.ki * state.error_integral + g.kd * derivative;
}

QSignal normalize_q_signal(double u, double cumulative_clicks) {
  if (!(cumulative_clicks > 0.0)) return {};
  return {u / cumulative_clicks, true};
}

double actuate(const PidState& state, double u) {
  const double c = state.limits.signal_clamp;
  const double v = std::clamp(u, -c, c);
  return state.x0 * std::exp(state.direction == Direction::inverse ? -v : v);
}

ReferenceProfile reference_from_step_costs(const std::vector<double>& step_costs, double budget,
                                           double cpc_ref) {
  ReferenceProfile refs;
  refs.cpc_ref = cpc_ref;
  double total = 0.0;
  for (double c : step_costs) total += c;
  const std::size_t steps = step_costs.size();
  refs.cost_ref.resize(steps);
  if (!(total > 0.0)) {
    refs.uniform_fallback = true;
    std::fill(refs.cost_ref.begin(), refs.cost_ref.end(),
              steps ? budget / static_cast<double>(steps) : 0.0);
    return refs;
  }
  for (std::size_t t = 0; t < steps; ++t) refs.cost_ref[t] = budget * step_costs[t] / total;
  return refs;
}

namespace {

class FixedOptimalPolicy final : public Strategy {
 public:
  explicit FixedOptimalPolicy(OptimalBidParams params) : params_(params) {}
  std::string_view name() const override { return "optimal-static"; }
  double bid(const Opportunity& opp) const override {
    if (!(params_.p + params_.q > 0.0)) return std::numeric_limits<double>::infinity();
    return optimal_bid(opp, params_);
  }
  StepControl snapshot() const override { return {}; }

 private:
  OptimalBidParams params_;
};

}  // namespace

ReferenceProfile build_cost_reference(const BidLog& training_log, const CampaignSpec& spec,
                                      const DualSolution& dual) {
  FixedOptimalPolicy policy({dual.p, dual.q, spec.cpc_cap});
  const auto trace = simulate_day(training_log, spec, policy);
  std::vector<double> step_costs;
  step_costs.reserve(trace.steps.size());
  for (const auto& rec : trace.steps) step_costs.push_back(rec.feedback.cost);
  return reference_from_step_costs(step_costs, spec.budget, spec.cpc_cap);
}

void validate(const MpcWeights& w) {
  if (!(w.alpha >= 0.0 && w.alpha <= 1.0 && w.beta >= 0.0 && w.beta <= 1.0))
    throw std::invalid_argument("mpc weights must lie in [0, 1]");
}

MixedSignals mpc_mix(double u_p, double u_q, const MpcWeights& w) {
  return {w.alpha * u_p + (1.0 - w.alpha) * u_q, (1.0 - w.beta) * u_p + w.beta * u_q};
}

CostChannel::CostChannel(PidGains gains, double x0, Direction direction,
                         const ReferenceProfile& refs, PidLimits limits)
    : cost_ref_(refs.cost_ref) {
  state_.gains = gains;
  state_.x0 = x0;
  state_.direction = direction;
  state_.limits = limits;
  double total = 0.0;
  for (double c : cost_ref_) total += c;
  if (!cost_ref_.empty() && total > 0.0) scale_ = total / static_cast<double>(cost_ref_.size());
}

double CostChannel::reference(int t) const {
  return t >= 0 && static_cast<std::size_t>(t) < cost_ref_.size() ? cost_ref_[t] : 0.0;
}

double CostChannel::signal(const StepFeedback& fb) {
  return pid_step(state_, reference(fb.t) / scale_, fb.cost / scale_);
}

CpcChannel::CpcChannel(PidGains gains, double x0, Direction direction, double cpc_ref,
                       PidLimits limits)
    : cpc_ref_(cpc_ref) {
  state_.gains = gains;
  state_.x0 = x0;
  state_.direction = direction;
  state_.limits = limits;
}

QSignal CpcChannel::signal(const StepFeedback& fb) {
  double u;
  if (fb.cpc && fb.clicks > 0.0)
    u = pid_step(state_, 1.0 / kCpcErrorUnit, *fb.cpc / (kCpcErrorUnit * cpc_ref_), fb.clicks);
  else
    u = pid_step(state_, 1.0, 1.0, 0.0);
  return normalize_q_signal(u, fb.cum_clicks);
}

DualControlLoop::DualControlLoop(OptimalBidParams initial, const ReferenceProfile& refs,
                                 const ControlConfig& config, ControlMode mode)
    : params_(initial),
      p_channel_(config.p_gains, initial.p, Direction::inverse, refs, config.limits),
      q_channel_(config.q_gains, initial.q, Direction::inverse, refs.cpc_ref, config.limits),
      weights_(config.weights),
      mode_(mode) {
  if (!(initial.p > 0.0 && initial.q > 0.0))
    throw std::invalid_argument("control loop needs positive initial p and q");
  validate(weights_);
}

const OptimalBidParams& DualControlLoop::step(const StepFeedback& fb) {
  const double u_p = p_channel_.signal(fb);
  const double u_q = q_channel_.signal(fb).value;
  MixedSignals mixed{u_p, u_q};
  if (mode_ == ControlMode::m_pid) mixed = mpc_mix(u_p, u_q, weights_);
  params_.p = p_channel_.actuate(mixed.u_p);
  params_.q = q_channel_.actuate(mixed.u_q);
  u_p_ = u_p;
  u_q_ = u_q;
  u_p_mixed_ = mixed.u_p;
  u_q_mixed_ = mixed.u_q;
  next_step_ = fb.t + 1;
  return params_;
}

StepControl DualControlLoop::snapshot() const {
  StepControl c;
  c.cost_ref = p_channel_.reference(next_step_);
  c.p = params_.p;
  c.q = params_.q;
  c.u_p = u_p_;
  c.u_q = u_q_;
  c.u_p_mixed = u_p_mixed_;
  c.u_q_mixed = u_q_mixed_;
  return c;
}

}  // namespace mvbid
