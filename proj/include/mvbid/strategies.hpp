#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "mvbid/auction.hpp"
#include "mvbid/control.hpp"

namespace mvbid {

enum class StrategyKind { optimal_static, i_pid, m_pid, cost_min, fb_control, fb_control_m };

inline constexpr StrategyKind kAllStrategies[] = {
    StrategyKind::optimal_static, StrategyKind::i_pid,      StrategyKind::m_pid,
    StrategyKind::cost_min,       StrategyKind::fb_control, StrategyKind::fb_control_m};

std::string_view to_string(StrategyKind kind);
/// Throws UsageError on an unknown name.
StrategyKind parse_strategy(std::string_view name);
bool is_controlled(StrategyKind kind);

/// Everything a strategy learns from the training day.
struct CampaignContext {
  CampaignSpec spec;
  DualSolution dual;
  ReferenceProfile refs;
  double mean_cvr = 0.0;   // unweighted, over the training log
  double p_scale = 0.0;    // p bracket of the training log, used when p* = q* = 0
};

CampaignContext make_context(const BidLog& train, const CampaignSpec& spec,
                             const DualSolveOptions& options = {});

/// Controller start point: (p*, q*) with each coordinate raised to at least
/// floor_ratio * (p* + q*) so the multiplicative actuator can move it.
OptimalBidParams initial_control_params(const CampaignContext& ctx, double floor_ratio = 0.01);

/// Bids with fixed (p, q); wins everything when p = q = 0.
class StaticOptimalStrategy final : public Strategy {
 public:
  explicit StaticOptimalStrategy(OptimalBidParams params) : params_(params) {}
  std::string_view name() const override { return "optimal-static"; }
  double bid(const Opportunity& opp) const override;
  StepControl snapshot() const override;

 private:
  OptimalBidParams params_;
};

class PidOptimalStrategy final : public Strategy {
 public:
  PidOptimalStrategy(const CampaignContext& ctx, const ControlConfig& config, ControlMode mode);
  std::string_view name() const override;
  double bid(const Opportunity& opp) const override { return optimal_bid(opp, loop_.params()); }
  void on_step(const StepFeedback& fb) override { loop_.step(fb); }
  StepControl snapshot() const override { return loop_.snapshot(); }

 private:
  DualControlLoop loop_;
  ControlMode mode_;
};

/// c_bid = min(b0 cvr, C); b0 tracks the cost reference, cap fixed at C.
class CostMinStrategy final : public Strategy {
 public:
  CostMinStrategy(const CampaignContext& ctx, const ControlConfig& config);
  std::string_view name() const override { return "cost-min"; }
  double bid(const Opportunity& opp) const override { return baseline_bid(opp, params_); }
  void on_step(const StepFeedback& fb) override;
  StepControl snapshot() const override;

 private:
  BaselineBidParams params_;
  CostChannel b0_channel_;
  int next_step_ = 0;
  std::optional<double> u_;
};

/// c_bid = b0 for every click; b0 tracks the CPC cap.
class FbControlStrategy final : public Strategy {
 public:
  FbControlStrategy(const CampaignContext& ctx, const ControlConfig& config);
  std::string_view name() const override { return "fb-control"; }
  double bid(const Opportunity& opp) const override { return baseline_bid(opp, params_); }
  void on_step(const StepFeedback& fb) override;
  StepControl snapshot() const override;

 private:
  BaselineBidParams params_;
  CpcChannel b0_channel_;
  std::optional<double> u_;
};

/// c_bid = min(b0 cvr, cap); b0 tracks the cost reference, cap the CPC cap.
class FbControlMStrategy final : public Strategy {
 public:
  FbControlMStrategy(const CampaignContext& ctx, const ControlConfig& config);
  std::string_view name() const override { return "fb-control-m"; }
  double bid(const Opportunity& opp) const override { return baseline_bid(opp, params_); }
  void on_step(const StepFeedback& fb) override;
  StepControl snapshot() const override;

 private:
  BaselineBidParams params_;
  CostChannel b0_channel_;
  CpcChannel cap_channel_;
  int next_step_ = 0;
  std::optional<double> u_p_, u_q_;
};

/// For baselines the cost channel (b0) takes p_gains and the CPC channel
/// (fb-control's b0, fb-control-m's cap) takes q_gains.
std::unique_ptr<Strategy> make_strategy(StrategyKind kind, const CampaignContext& ctx,
                                        const ControlConfig& config = {});

}  // namespace mvbid
