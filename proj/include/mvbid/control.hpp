#pragma once

#include <optional>
#include <vector>

#include "mvbid/auction.hpp"
#include "mvbid/bidding.hpp"
#include "mvbid/dual.hpp"

namespace mvbid {

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  bool operator==(const PidGains&) const = default;
};

/// inverse: raising the input lowers the output, so x = x0 exp(-u).
/// direct: x = x0 exp(+u).
enum class Direction { inverse, direct };

struct PidLimits {
  double integral_clamp = 1e6;  // anti-windup bound on the error sum
  double signal_clamp = 50.0;   // |u| bound applied before exponentiation
  bool operator==(const PidLimits&) const = default;
};

/// Discrete PID in position form:
///   e(t) = w (r - y),  u(t) = kp e(t) + ki sum e + kd (e(t) - e(t-1))
/// with e(0) = 0 for the first derivative term.
struct PidState {
  PidGains gains;
  double error_integral = 0.0;
  double previous_error = 0.0;
  double x0 = 1.0;
  Direction direction = Direction::inverse;
  PidLimits limits;
};

/// Feeds one error sample and returns u(t). When weight is given the error
/// is weight * (reference - measured).
double pid_step(PidState& state, double reference, double measured,
                std::optional<double> weight = std::nullopt);

struct QSignal {
  double value = 0.0;
  bool has_evidence = false;
};

/// u / cumulative clicks; zero with has_evidence = false before any click.
QSignal normalize_q_signal(double u, double cumulative_clicks);

/// x(t+1) = x0 exp(-u) (inverse) or x0 exp(u) (direct), u clamped first.
double actuate(const PidState& state, double u);

struct ReferenceProfile {
  std::vector<double> cost_ref;  // per step, sums to B
  double cpc_ref = 0.0;
  bool uniform_fallback = false;  // set when the training run spent nothing
  bool operator==(const ReferenceProfile&) const = default;
};

/// B * step_cost / total_cost per step, uniform when nothing was spent.
ReferenceProfile reference_from_step_costs(const std::vector<double>& step_costs, double budget,
                                           double cpc_ref);

/// Replays the static optimal strategy of `dual` on the training log and
/// turns its per-step spend into a budget-scaled reference.
ReferenceProfile build_cost_reference(const BidLog& training_log, const CampaignSpec& spec,
                                      const DualSolution& dual);

struct MpcWeights {
  double alpha = 1.0;
  double beta = 1.0;
  bool operator==(const MpcWeights&) const = default;
};

void validate(const MpcWeights& w);

struct MixedSignals {
  double u_p = 0.0;
  double u_q = 0.0;
};

/// [u'_p; u'_q] = [alpha, 1 - alpha; 1 - beta, beta] [u_p; u_q]
MixedSignals mpc_mix(double u_p, double u_q, const MpcWeights& w);

/// Tracks per-step cost against the reference. Errors are measured in units
/// of the mean step budget B / T so gains do not depend on the currency scale.
class CostChannel {
 public:
  CostChannel() = default;
  CostChannel(PidGains gains, double x0, Direction direction, const ReferenceProfile& refs,
              PidLimits limits = {});
  double signal(const StepFeedback& fb);
  double actuate(double u) const { return mvbid::actuate(state_, u); }
  double reference(int t) const;
  const PidState& state() const { return state_; }

 private:
  PidState state_;
  std::vector<double> cost_ref_;
  double scale_ = 1.0;
};

/// Width of the CPC error unit as a share of C.
inline constexpr double kCpcErrorUnit = 0.1;

/// Click-weighted CPC channel: e(t) = clicks(t) (C - cpc(t)) / (0.1 C), signal
/// divided by cumulative clicks. Steps without clicks feed a zero error.
class CpcChannel {
 public:
  CpcChannel() = default;
  CpcChannel(PidGains gains, double x0, Direction direction, double cpc_ref,
             PidLimits limits = {});
  QSignal signal(const StepFeedback& fb);
  double actuate(double u) const { return mvbid::actuate(state_, u); }
  const PidState& state() const { return state_; }

 private:
  PidState state_;
  double cpc_ref_ = 1.0;
};

enum class ControlMode { i_pid, m_pid };

struct ControlConfig {
  PidGains p_gains;
  PidGains q_gains;
  MpcWeights weights;  // used in m_pid mode only
  PidLimits limits;
  bool operator==(const ControlConfig&) const = default;
};

/// Two-channel controller over (p, q): p follows the cost reference, q the
/// CPC cap; both act inversely. In m_pid mode the raw signals pass through
/// mpc_mix before actuation.
class DualControlLoop {
 public:
  DualControlLoop(OptimalBidParams initial, const ReferenceProfile& refs,
                  const ControlConfig& config, ControlMode mode);

  /// Consumes step feedback and returns the parameters for the next step.
  const OptimalBidParams& step(const StepFeedback& fb);

  const OptimalBidParams& params() const { return params_; }
  StepControl snapshot() const;

 private:
  OptimalBidParams params_;
  CostChannel p_channel_;
  CpcChannel q_channel_;
  MpcWeights weights_;
  ControlMode mode_;
  int next_step_ = 0;
  std::optional<double> u_p_, u_q_, u_p_mixed_, u_q_mixed_;
};

}  // namespace mvbid
