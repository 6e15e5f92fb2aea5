#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mvbid/kernels.hpp"
#include "mvbid/strategies.hpp"
#include "mvbid/synthetic.hpp"

namespace mvbid {

inline constexpr double kCpcOvershootMargin = 1.1;

struct CampaignResult {
  std::string campaign_id;
  std::string strategy;
  double R = 0.0;
  double R_star = 0.0;
  double value_fraction = 0.0;  // R / R*, 1 when R* = 0
  std::optional<double> cpc;    // accumulated; unset without clicks
  bool cpc_satisfied = true;    // cpc <= 1.1 C, or no clicks
  double cost = 0.0;
  double budget = 0.0;
  double cpc_cap = 0.0;
  Termination termination = Termination::log_end;
  bool operator==(const CampaignResult&) const = default;
};

/// Builds a result row from a finished simulation.
CampaignResult score_campaign(const CampaignSpec& spec, std::string_view strategy,
                              const SimulationTrace& trace, double r_star);

struct StrategySummary {
  std::string strategy;
  std::size_t campaigns = 0;
  double cpc_ratio = 0.0;    // share of campaigns with cpc_satisfied
  double value_ratio = 0.0;  // mean R/R* over cpc_satisfied campaigns
  bool operator==(const StrategySummary&) const = default;
};

StrategySummary summarize_results(std::string_view strategy,
                                  const std::vector<CampaignResult>& results);

struct BatchReport {
  std::vector<StrategySummary> strategies;
  std::vector<CampaignResult> campaigns;
  bool operator==(const BatchReport&) const = default;
};

/// Controller settings chosen by grid search, pooled per strategy with
/// optional per-campaign overrides.
struct TunedConfig {
  std::map<StrategyKind, ControlConfig> pooled;
  std::map<std::string, std::map<StrategyKind, ControlConfig>> per_campaign;

  /// Throws UsageError when a controlled strategy has no entry.
  const ControlConfig& lookup(StrategyKind kind, const std::string& campaign_id) const;
  bool operator==(const TunedConfig&) const = default;
};

/// One campaign of the experiment: the training day (dual solve and cost
/// reference), a second training-period day used for tuning, and the test day.
struct CampaignData {
  CampaignSpec spec;
  BidLog train;
  BidLog tune;
  BidLog test;
};

/// CampaignData plus everything derived from it once.
struct PreparedCampaign {
  CampaignData data;
  CampaignContext ctx;
  double r_star_tune = 0.0;
  double r_star_test = 0.0;
};

PreparedCampaign prepare_campaign(CampaignData data, const DualSolveOptions& options = {});
std::vector<PreparedCampaign> prepare_batch(std::vector<CampaignData> batch,
                                            Execution exec = Execution::parallel,
                                            const DualSolveOptions& options = {});

enum class EvalDay { tune, test };

CampaignResult run_prepared(const PreparedCampaign& campaign, EvalDay day, StrategyKind kind,
                            const ControlConfig& config, SimulationTrace* trace_out = nullptr);

/// Full flow for one campaign: dual solve on train, simulate on test from
/// (p*, q*), R* from the test log.
CampaignResult run_campaign(const BidLog& train, const BidLog& test, const CampaignSpec& spec,
                            StrategyKind kind, const ControlConfig& config = {},
                            SimulationTrace* trace_out = nullptr);

struct SearchSpace {
  std::vector<double> kp{0, 0.01, 0.03, 0.1, 0.3, 1, 3};
  std::vector<double> ki{0, 0.01, 0.03, 0.1, 0.3, 1, 3};
  std::vector<double> kd{0, 0.1, 1};
  std::vector<double> alpha{0, 0.25, 0.5, 0.75, 1};
  std::vector<double> beta{0, 0.25, 0.5, 0.75, 1};
  bool operator==(const SearchSpace&) const = default;
};

struct TuneScore {
  double cpc_ratio = 0.0;
  double value_ratio = 0.0;
};

/// Constraint first, value second; ties keep the incumbent.
bool better(const TuneScore& a, const TuneScore& b);

struct TuneOutcome {
  ControlConfig config;
  TuneScore score;
  std::size_t evaluated = 0;
  bool feasible = true;  // false when no evaluated config reached CPC_ratio 1
};

/// Scores one config over the tuning days of the given campaigns.
TuneScore score_config(const std::vector<PreparedCampaign>& campaigns, StrategyKind kind,
                       const ControlConfig& config);

inline constexpr int kMaxChannelRounds = 4;

/// Staged grid search on the tuning days. Single-channel strategies scan
/// the (kp, ki, kd) grid. Two-channel strategies scan shared gains, then run
/// rounds of: p-channel scan, q-channel scan, and joint (p, q) scans of ki,
/// kp and kd, until a round changes nothing or kMaxChannelRounds is reached.
/// m-pid follows the i-pid path (alpha = beta = 1), scans (alpha, beta), then
/// alternates again. Every stage keeps its incumbent, so later stages never
/// lose training score.
TuneOutcome grid_search(const std::vector<PreparedCampaign>& campaigns, StrategyKind kind,
                        const SearchSpace& space, Execution exec = Execution::parallel);

/// Tunes every controlled strategy in `kinds`; with per_campaign set, each
/// campaign is also tuned on its own tuning day.
TunedConfig tune_all(const std::vector<PreparedCampaign>& campaigns,
                     const std::vector<StrategyKind>& kinds, const SearchSpace& space,
                     bool per_campaign = false, Execution exec = Execution::parallel);

/// Runs every strategy on every campaign's test day.
BatchReport evaluate_batch(const std::vector<PreparedCampaign>& campaigns,
                           const std::vector<StrategyKind>& kinds, const TunedConfig& tuned,
                           Execution exec = Execution::parallel);

/// Parameters of the synthetic campaign batch.
struct BatchConfig {
  std::size_t n_campaigns = 20;
  std::uint64_t seed = 1;
  std::size_t n_min = 50000;
  std::size_t n_max = 100000;
  int num_steps = 24;
  double first_cpc_cap = 200.0;      // campaign 0 uses exactly this cap
  double cpc_cap_min = 120.0;
  double cpc_cap_max = 300.0;
  double budget_fraction_min = 0.3;  // B as a share of cpc_limited_spend on the training day
  double budget_fraction_max = 0.6;
  double ctr_mean_min = 0.01;
  double ctr_mean_max = 0.05;
  double cvr_mean_min = 0.005;
  double cvr_mean_max = 0.05;
  double cvr_shape_a = 3.0;  // first cvr beta parameter; b follows from the mean
  double ctr_concentration = 8.0;
  double click_price_min = 2.0;  // median click price relative to C
  double click_price_max = 4.0;
  double wp_ctr_exponent_min = 0.4;
  double wp_ctr_exponent_max = 0.9;
  double wp_cvr_exponent_min = 0.6;
  double wp_cvr_exponent_max = 0.9;
  double wp_noise_min = 0.3;
  double wp_noise_max = 0.6;
  double test_wp_factor = 1.2;
  double test_volume_amplitude = 0.3;
  double tune_wp_factor_min = 0.85;
  double tune_wp_factor_max = 1.25;
  double tune_volume_amplitude_max = 0.3;
  bool operator==(const BatchConfig&) const = default;
};

/// Training-day spend of the static optimal policy when only the CPC cap binds.
double cpc_limited_spend(const BidLog& log, const CampaignSpec& spec);

/// Generator settings for one campaign of a batch.
struct CampaignRecipe {
  CampaignSpec spec;
  double budget_fraction = 0.0;
  SyntheticConfig day;       // train day; drift describes the test day
  SyntheticConfig tune_day;  // drift describes the tuning day
};

std::vector<CampaignRecipe> make_batch_recipes(const BatchConfig& cfg);

/// Generates the three logs and fixes B from the training day's spend.
CampaignData materialize(const CampaignRecipe& recipe);

std::vector<CampaignData> generate_batch(const BatchConfig& cfg,
                                         Execution exec = Execution::parallel);

/// Multiplicative per-step volume reshaping 1 + amplitude sin(2 pi t / T + phase).
std::vector<double> volume_reshape(int steps, double amplitude, double phase);

}  // namespace mvbid
