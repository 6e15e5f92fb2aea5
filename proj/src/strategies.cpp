#include "mvbid/strategies.hpp"

#include <limits>

#include "mvbid/bid_log.hpp"

namespace mvbid {

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::optimal_static: return "optimal-static";
    case StrategyKind::i_pid: return "i-pid";
    case StrategyKind::m_pid: return "m-pid";
    case StrategyKind::cost_min: return "cost-min";
    case StrategyKind::fb_control: return "fb-control";
    case StrategyKind::fb_control_m: return "fb-control-m";
  }
  return "?";
}

StrategyKind parse_strategy(std::string_view name) {
  for (auto k : kAllStrategies)
    if (to_string(k) == name) return k;
  throw UsageError("unknown strategy '" + std::string(name) + "'");
}

bool is_controlled(StrategyKind kind) { return kind != StrategyKind::optimal_static; }

CampaignContext make_context(const BidLog& train, const CampaignSpec& spec,
                             const DualSolveOptions& options) {
  CampaignContext ctx;
  ctx.spec = spec;
  const auto terms = DualTerms::from(train, spec);
  ctx.dual = solve_dual(terms, options);
  ctx.p_scale = dual_bracket(terms).p_max;
  ctx.refs = build_cost_reference(train, spec, ctx.dual);
  ctx.mean_cvr = summarize_log(train, spec.step_seconds, spec.num_steps).mean_cvr;
  return ctx;
}

OptimalBidParams initial_control_params(const CampaignContext& ctx, double floor_ratio) {
  double scale = ctx.dual.p + ctx.dual.q;
  if (!(scale > 0.0)) scale = ctx.p_scale > 0.0 ? ctx.p_scale : 1.0;
  const double floor = floor_ratio * scale;
  return {std::max(ctx.dual.p, floor), std::max(ctx.dual.q, floor), ctx.spec.cpc_cap};
}

double StaticOptimalStrategy::bid(const Opportunity& opp) const {
  if (!(params_.p + params_.q > 0.0)) return std::numeric_limits<double>::infinity();
  return optimal_bid(opp, params_);
}

StepControl StaticOptimalStrategy::snapshot() const {
  StepControl c;
  c.p = params_.p;
  c.q = params_.q;
  return c;
}

PidOptimalStrategy::PidOptimalStrategy(const CampaignContext& ctx, const ControlConfig& config,
                                       ControlMode mode)
    : loop_(initial_control_params(ctx), ctx.refs, config, mode), mode_(mode) {}

std::string_view PidOptimalStrategy::name() const {
  return mode_ == ControlMode::i_pid ? "i-pid" : "m-pid";
}

namespace {

double cvr_scaled_start(const CampaignContext& ctx) {
  return ctx.mean_cvr > 0.0 ? ctx.spec.cpc_cap / ctx.mean_cvr : ctx.spec.cpc_cap;
}

}  // namespace

CostMinStrategy::CostMinStrategy(const CampaignContext& ctx, const ControlConfig& config)
    : params_{cvr_scaled_start(ctx), ctx.spec.cpc_cap, BaselineVariant::cost_min},
      b0_channel_(config.p_gains, params_.b0, Direction::direct, ctx.refs, config.limits) {}

void CostMinStrategy::on_step(const StepFeedback& fb) {
  u_ = b0_channel_.signal(fb);
  params_.b0 = b0_channel_.actuate(*u_);
  next_step_ = fb.t + 1;
}

StepControl CostMinStrategy::snapshot() const {
  StepControl c;
  c.cost_ref = b0_channel_.reference(next_step_);
  c.b0 = params_.b0;
  c.cap = params_.cap;
  c.u_p = u_;
  return c;
}

FbControlStrategy::FbControlStrategy(const CampaignContext& ctx, const ControlConfig& config)
    : params_{ctx.spec.cpc_cap, std::nullopt, BaselineVariant::fb_control},
      b0_channel_(config.q_gains, params_.b0, Direction::direct, ctx.spec.cpc_cap,
                  config.limits) {}

void FbControlStrategy::on_step(const StepFeedback& fb) {
  u_ = b0_channel_.signal(fb).value;
  params_.b0 = b0_channel_.actuate(*u_);
}

StepControl FbControlStrategy::snapshot() const {
  StepControl c;
  c.b0 = params_.b0;
  c.u_q = u_;
  return c;
}

FbControlMStrategy::FbControlMStrategy(const CampaignContext& ctx, const ControlConfig& config)
    : params_{cvr_scaled_start(ctx), ctx.spec.cpc_cap, BaselineVariant::fb_control_m},
      b0_channel_(config.p_gains, params_.b0, Direction::direct, ctx.refs, config.limits),
      cap_channel_(config.q_gains, ctx.spec.cpc_cap, Direction::direct, ctx.spec.cpc_cap,
                   config.limits) {}

void FbControlMStrategy::on_step(const StepFeedback& fb) {
  u_p_ = b0_channel_.signal(fb);
  u_q_ = cap_channel_.signal(fb).value;
  params_.b0 = b0_channel_.actuate(*u_p_);
  params_.cap = cap_channel_.actuate(*u_q_);
  next_step_ = fb.t + 1;
}

StepControl FbControlMStrategy::snapshot() const {
  StepControl c;
  c.cost_ref = b0_channel_.reference(next_step_);
  c.b0 = params_.b0;
  c.cap = params_.cap;
  c.u_p = u_p_;
  c.u_q = u_q_;
  return c;
}

std::unique_ptr<Strategy> make_strategy(StrategyKind kind, const CampaignContext& ctx,
                                        const ControlConfig& config) {
  switch (kind) {
    case StrategyKind::optimal_static:
      return std::make_unique<StaticOptimalStrategy>(
          OptimalBidParams{ctx.dual.p, ctx.dual.q, ctx.spec.cpc_cap});
    case StrategyKind::i_pid:
      return std::make_unique<PidOptimalStrategy>(ctx, config, ControlMode::i_pid);
    case StrategyKind::m_pid:
      return std::make_unique<PidOptimalStrategy>(ctx, config, ControlMode::m_pid);
    case StrategyKind::cost_min: return std::make_unique<CostMinStrategy>(ctx, config);
    case StrategyKind::fb_control: return std::make_unique<FbControlStrategy>(ctx, config);
    case StrategyKind::fb_control_m: return std::make_unique<FbControlMStrategy>(ctx, config);
  }
  throw UsageError("unknown strategy");
}

}  // namespace mvbid
