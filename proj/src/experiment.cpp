#include "mvbid/experiment.hpp"

#include <cmath>
#include <exception>
#include <numbers>
#include <random>

namespace mvbid {

namespace {

// Runs fn(i) for i in [0, n). Exceptions cannot cross an OpenMP region, so
// they are caught per index and the lowest-index one is rethrown afterwards.
template <typename Fn>
void for_each_index(long n, Execution exec, Fn&& fn) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel)
  for (long i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace


CampaignResult score_campaign(const CampaignSpec& spec, std::string_view strategy,
                              const SimulationTrace& trace, double r_star) {
  CampaignResult r;
  r.campaign_id = spec.campaign_id;
  r.strategy = std::string(strategy);
  r.R = trace.value;
  r.R_star = r_star;
  r.value_fraction = r_star > 0.0 ? trace.value / r_star : 1.0;
  r.cpc = trace.cpc;
  r.cpc_satisfied = !trace.cpc || *trace.cpc <= kCpcOvershootMargin * spec.cpc_cap;
  r.cost = trace.cost;
  r.budget = spec.budget;
  r.cpc_cap = spec.cpc_cap;
  r.termination = trace.termination;
  return r;
}

StrategySummary summarize_results(std::string_view strategy,
                                  const std::vector<CampaignResult>& results) {
  StrategySummary s;
  s.strategy = std::string(strategy);
  std::size_t satisfied = 0;
  double value_sum = 0.0;
  for (const auto& r : results) {
    if (r.strategy != strategy) continue;
    ++s.campaigns;
    if (r.cpc_satisfied) {
      ++satisfied;
      value_sum += r.value_fraction;
    }
  }
  if (s.campaigns > 0) s.cpc_ratio = static_cast<double>(satisfied) / static_cast<double>(s.campaigns);
  if (satisfied > 0) s.value_ratio = value_sum / static_cast<double>(satisfied);
  return s;
}

const ControlConfig& TunedConfig::lookup(StrategyKind kind, const std::string& campaign_id) const {
  if (auto it = per_campaign.find(campaign_id); it != per_campaign.end()) {
    if (auto jt = it->second.find(kind); jt != it->second.end()) return jt->second;
  }
  if (auto it = pooled.find(kind); it != pooled.end()) return it->second;
  if (!is_controlled(kind)) {
    static const ControlConfig none{};
    return none;
  }
  throw UsageError("no tuned config for strategy " + std::string(to_string(kind)));
}

PreparedCampaign prepare_campaign(CampaignData data, const DualSolveOptions& options) {
  PreparedCampaign p;
  p.ctx = make_context(data.train, data.spec, options);
  p.r_star_tune = hindsight_optimal_value(data.tune, data.spec, options);
  p.r_star_test = hindsight_optimal_value(data.test, data.spec, options);
  p.data = std::move(data);
  return p;
}

std::vector<PreparedCampaign> prepare_batch(std::vector<CampaignData> batch, Execution exec,
                                            const DualSolveOptions& options) {
  std::vector<PreparedCampaign> out(batch.size());
  const long n = static_cast<long>(batch.size());
  for_each_index(n, exec, [&](long i) { out[i] = prepare_campaign(std::move(batch[i]), options); });
  return out;
}

CampaignResult run_prepared(const PreparedCampaign& campaign, EvalDay day, StrategyKind kind,
                            const ControlConfig& config, SimulationTrace* trace_out) {
  auto strategy = make_strategy(kind, campaign.ctx, config);
  const BidLog& log = day == EvalDay::tune ? campaign.data.tune : campaign.data.test;
  const double r_star = day == EvalDay::tune ? campaign.r_star_tune : campaign.r_star_test;
  auto trace = simulate_day(log, campaign.data.spec, *strategy);
  auto result = score_campaign(campaign.data.spec, to_string(kind), trace, r_star);
  if (trace_out) *trace_out = std::move(trace);
  return result;
}

CampaignResult run_campaign(const BidLog& train, const BidLog& test, const CampaignSpec& spec,
                            StrategyKind kind, const ControlConfig& config,
                            SimulationTrace* trace_out) {
  validate(spec);
  const auto ctx = make_context(train, spec);
  auto strategy = make_strategy(kind, ctx, config);
  auto trace = simulate_day(test, spec, *strategy);
  auto result = score_campaign(spec, to_string(kind), trace, hindsight_optimal_value(test, spec));
  if (trace_out) *trace_out = std::move(trace);
  return result;
}

bool better(const TuneScore& a, const TuneScore& b) {
  if (a.cpc_ratio != b.cpc_ratio) return a.cpc_ratio > b.cpc_ratio;
  return a.value_ratio > b.value_ratio;
}

TuneScore score_config(const std::vector<PreparedCampaign>& campaigns, StrategyKind kind,
                       const ControlConfig& config) {
  std::vector<CampaignResult> results;
  results.reserve(campaigns.size());
  for (const auto& c : campaigns) results.push_back(run_prepared(c, EvalDay::tune, kind, config));
  const auto s = summarize_results(to_string(kind), results);
  return {s.cpc_ratio, s.value_ratio};
}

namespace {

std::vector<PidGains> gain_grid(const SearchSpace& space) {
  std::vector<PidGains> grid;
  for (double kp : space.kp)
    for (double ki : space.ki)
      for (double kd : space.kd) grid.push_back({kp, ki, kd});
  return grid;
}

class StagedSearch {
 public:
  StagedSearch(const std::vector<PreparedCampaign>& campaigns, StrategyKind kind, Execution exec)
      : campaigns_(campaigns), kind_(kind), exec_(exec) {}

  // Candidates are scored in parallel, then compared in grid order.
  void stage(const std::vector<ControlConfig>& candidates) {
    std::vector<TuneScore> scores(candidates.size());
    const long n = static_cast<long>(candidates.size());
    for_each_index(n, exec_, [&](long i) { scores[i] = score_config(campaigns_, kind_, candidates[i]); });
    best_.evaluated += candidates.size();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (!started_ || better(scores[i], best_.score)) {
        best_.config = candidates[i];
        best_.score = scores[i];
        started_ = true;
      }
    }
  }

  const ControlConfig& incumbent() const { return best_.config; }
  TuneOutcome result() const {
    TuneOutcome out = best_;
    out.feasible = out.score.cpc_ratio >= 1.0;
    return out;
  }

 private:
  const std::vector<PreparedCampaign>& campaigns_;
  StrategyKind kind_;
  Execution exec_;
  TuneOutcome best_;
  bool started_ = false;
};

}  // namespace

TuneOutcome grid_search(const std::vector<PreparedCampaign>& campaigns, StrategyKind kind,
                        const SearchSpace& space, Execution exec) {
  if (!is_controlled(kind)) return {};
  const auto grid = gain_grid(space);
  if (grid.empty()) throw UsageError("grid_search: empty gain grid");
  StagedSearch search(campaigns, kind, exec);

  auto with = [](ControlConfig c, auto&& edit) {
    edit(c);
    return c;
  };
  auto channel_stage = [&](bool p_channel) {
    std::vector<ControlConfig> cands;
    for (const auto& g : grid)
      cands.push_back(with(search.incumbent(), [&](ControlConfig& c) {
        (p_channel ? c.p_gains : c.q_gains) = g;
      }));
    search.stage(cands);
  };
  auto paired_stage = [&](double PidGains::*component, const std::vector<double>& values) {
    std::vector<ControlConfig> cands;
    for (double vp : values)
      for (double vq : values)
        cands.push_back(with(search.incumbent(), [&](ControlConfig& c) {
          c.p_gains.*component = vp;
          c.q_gains.*component = vq;
        }));
    search.stage(cands);
  };
  auto alternate_channels = [&] {
    for (int round = 0; round < kMaxChannelRounds; ++round) {
      const ControlConfig before = search.incumbent();
      channel_stage(true);
      channel_stage(false);
      paired_stage(&PidGains::ki, space.ki);
      paired_stage(&PidGains::kp, space.kp);
      paired_stage(&PidGains::kd, space.kd);
      if (search.incumbent() == before) break;
    }
  };

  switch (kind) {
    case StrategyKind::cost_min:
    case StrategyKind::fb_control: {
      const bool p_channel = kind == StrategyKind::cost_min;
      std::vector<ControlConfig> cands;
      for (const auto& g : grid)
        cands.push_back(with(ControlConfig{}, [&](ControlConfig& c) {
          (p_channel ? c.p_gains : c.q_gains) = g;
        }));
      search.stage(cands);
      break;
    }
    case StrategyKind::i_pid:
    case StrategyKind::fb_control_m:
    case StrategyKind::m_pid: {
      std::vector<ControlConfig> shared;
      for (const auto& g : grid)
        shared.push_back(with(ControlConfig{}, [&](ControlConfig& c) {
          c.p_gains = g;
          c.q_gains = g;
        }));
      search.stage(shared);
      alternate_channels();
      if (kind != StrategyKind::m_pid) break;
      std::vector<ControlConfig> mixes;
      for (double a : space.alpha)
        for (double b : space.beta)
          mixes.push_back(with(search.incumbent(), [&](ControlConfig& c) { c.weights = {a, b}; }));
      search.stage(mixes);
      alternate_channels();
      break;
    }
    case StrategyKind::optimal_static: break;
  }
  return search.result();
}

TunedConfig tune_all(const std::vector<PreparedCampaign>& campaigns,
                     const std::vector<StrategyKind>& kinds, const SearchSpace& space,
                     bool per_campaign, Execution exec) {
  TunedConfig tuned;
  for (auto kind : kinds) {
    if (!is_controlled(kind)) continue;
    tuned.pooled[kind] = grid_search(campaigns, kind, space, exec).config;
    if (!per_campaign) continue;
    for (const auto& c : campaigns) {
      std::vector<PreparedCampaign> one{c};
      tuned.per_campaign[c.data.spec.campaign_id][kind] =
          grid_search(one, kind, space, exec).config;
    }
  }
  return tuned;
}

BatchReport evaluate_batch(const std::vector<PreparedCampaign>& campaigns,
                           const std::vector<StrategyKind>& kinds, const TunedConfig& tuned,
                           Execution exec) {
  BatchReport report;
  if (kinds.empty()) return report;
  const std::size_t nk = kinds.size();
  std::vector<CampaignResult> cells(campaigns.size() * nk);
  const long n = static_cast<long>(cells.size());
  for_each_index(n, exec, [&](long i) {
    const auto& c = campaigns[static_cast<std::size_t>(i) / nk];
    const auto kind = kinds[static_cast<std::size_t>(i) % nk];
    cells[i] = run_prepared(c, EvalDay::test, kind, tuned.lookup(kind, c.data.spec.campaign_id));
  });
  report.campaigns = std::move(cells);
  for (auto kind : kinds) report.strategies.push_back(summarize_results(to_string(kind), report.campaigns));
  return report;
}

std::vector<double> volume_reshape(int steps, double amplitude, double phase) {
  std::vector<double> f(static_cast<std::size_t>(steps));
  for (int t = 0; t < steps; ++t)
    f[t] = 1.0 + amplitude * std::sin(2.0 * std::numbers::pi * t / steps + phase);
  return f;
}

std::vector<CampaignRecipe> make_batch_recipes(const BatchConfig& cfg) {
  if (cfg.n_campaigns == 0) throw DataError("batch: n_campaigns must be positive");
  if (cfg.num_steps <= 0 || kSecondsPerDay % cfg.num_steps != 0)
    throw DataError("batch: num_steps must divide 86400");
  if (cfg.n_min == 0 || cfg.n_max < cfg.n_min) throw DataError("batch: bad opportunity range");

  std::mt19937_64 rng(cfg.seed);
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  auto beta_with_mean = [](double mean, double concentration) {
    return BetaShape{mean * concentration, (1.0 - mean) * concentration};
  };
  const double two_pi = 2.0 * std::numbers::pi;

  std::vector<CampaignRecipe> recipes;
  for (std::size_t i = 0; i < cfg.n_campaigns; ++i) {
    CampaignRecipe r;
    r.spec.campaign_id = "c" + std::to_string(i);
    r.spec.step_seconds = kSecondsPerDay / cfg.num_steps;
    r.spec.num_steps = cfg.num_steps;
    r.spec.cpc_cap = i == 0 ? cfg.first_cpc_cap : uniform(cfg.cpc_cap_min, cfg.cpc_cap_max);
    r.budget_fraction = uniform(cfg.budget_fraction_min, cfg.budget_fraction_max);

    auto& d = r.day;
    d.n_opportunities = static_cast<std::size_t>(
        std::uniform_int_distribution<std::size_t>(cfg.n_min, cfg.n_max)(rng));
    const double diurnal = uniform(0.3, 0.7), peak = uniform(0.0, two_pi);
    d.volume_profile = volume_reshape(cfg.num_steps, diurnal, peak);
    double total = 0.0;
    for (double w : d.volume_profile) total += w;
    for (double& w : d.volume_profile) w /= total;
    const double ctr_mean = uniform(cfg.ctr_mean_min, cfg.ctr_mean_max);
    d.ctr_shape = beta_with_mean(ctr_mean, cfg.ctr_concentration);
    const double cvr_mean = uniform(cfg.cvr_mean_min, cfg.cvr_mean_max);
    d.cvr_shape = {cfg.cvr_shape_a, cfg.cvr_shape_a * (1.0 - cvr_mean) / cvr_mean};
    d.wp_ctr_exponent = uniform(cfg.wp_ctr_exponent_min, cfg.wp_ctr_exponent_max);
    d.wp_cvr_exponent = uniform(cfg.wp_cvr_exponent_min, cfg.wp_cvr_exponent_max);
    d.wp_noise_sigma = uniform(cfg.wp_noise_min, cfg.wp_noise_max);
    // Median click price wp / ctr at mean ctr.
    d.wp_base = uniform(cfg.click_price_min, cfg.click_price_max) * r.spec.cpc_cap * ctr_mean;
    d.drift.wp_factor = cfg.test_wp_factor;
    d.drift.volume_factors =
        volume_reshape(cfg.num_steps, cfg.test_volume_amplitude, uniform(0.0, two_pi));
    d.rng_seed = rng();

    r.tune_day = d;
    r.tune_day.drift.wp_factor = uniform(cfg.tune_wp_factor_min, cfg.tune_wp_factor_max);
    r.tune_day.drift.volume_factors = volume_reshape(
        cfg.num_steps, uniform(0.0, cfg.tune_volume_amplitude_max), uniform(0.0, two_pi));
    r.tune_day.rng_seed = rng();
    recipes.push_back(std::move(r));
  }
  return recipes;
}

double cpc_limited_spend(const BidLog& log, const CampaignSpec& spec) {
  CampaignSpec open = spec;
  open.budget = 0.0;
  for (const auto& o : log) open.budget += o.wp;
  const auto dual = solve_dual(log, open);
  StaticOptimalStrategy policy({dual.p, dual.q, spec.cpc_cap});
  return simulate_day(log, open, policy).cost;
}

CampaignData materialize(const CampaignRecipe& recipe) {
  BidLog train = generate_log(recipe.day, DayKind::train);
  BidLog test = generate_log(recipe.day, DayKind::test);
  BidLog tune_raw = generate_log(recipe.tune_day, DayKind::test);
  BidLog tune(tune_raw.opportunities(), "tune");
  CampaignSpec spec = recipe.spec;
  spec.budget = recipe.budget_fraction * cpc_limited_spend(train, spec);
  return {spec, std::move(train), std::move(tune), std::move(test)};
}

std::vector<CampaignData> generate_batch(const BatchConfig& cfg, Execution exec) {
  const auto recipes = make_batch_recipes(cfg);
  std::vector<CampaignData> out(recipes.size());
  const long n = static_cast<long>(recipes.size());
  for_each_index(n, exec, [&](long i) { out[i] = materialize(recipes[i]); });
  return out;
}

}  // namespace mvbid
