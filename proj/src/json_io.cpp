#include "mvbid/json_io.hpp"

#include <fstream>
#include <ostream>

#include "mvbid/bid_log.hpp"

namespace mvbid {

void to_json(json& j, const BetaShape& v) { j = {{"a", v.a}, {"b", v.b}}; }
void from_json(const json& j, BetaShape& v) {
  if (j.is_array()) {
    v.a = j.at(0).get<double>();
    v.b = j.at(1).get<double>();
    return;
  }
  v.a = j.at("a").get<double>();
  v.b = j.at("b").get<double>();
}

void to_json(json& j, const Drift& v) {
  j = {{"wp_factor", v.wp_factor}, {"volume_factors", v.volume_factors}};
}
void from_json(const json& j, Drift& v) {
  v.wp_factor = j.at("wp_factor").get<double>();
  v.volume_factors = j.at("volume_factors").get<std::vector<double>>();
}

void to_json(json& j, const SyntheticConfig& v) {
  j = {{"n_opportunities", v.n_opportunities},
       {"volume_profile", v.volume_profile},
       {"ctr_shape", v.ctr_shape},
       {"cvr_shape", v.cvr_shape},
       {"wp_base", v.wp_base},
       {"wp_ctr_exponent", v.wp_ctr_exponent},
       {"wp_cvr_exponent", v.wp_cvr_exponent},
       {"wp_noise_sigma", v.wp_noise_sigma},
       {"drift", v.drift},
       {"rng_seed", v.rng_seed}};
}
void from_json(const json& j, SyntheticConfig& v) {
  v.n_opportunities = j.at("n_opportunities").get<std::size_t>();
  v.volume_profile = j.at("volume_profile").get<std::vector<double>>();
  v.ctr_shape = j.at("ctr_shape").get<BetaShape>();
  v.cvr_shape = j.at("cvr_shape").get<BetaShape>();
  v.wp_base = j.at("wp_base").get<double>();
  v.wp_ctr_exponent = j.at("wp_ctr_exponent").get<double>();
  v.wp_cvr_exponent = j.value("wp_cvr_exponent", 0.0);
  v.wp_noise_sigma = j.at("wp_noise_sigma").get<double>();
  v.drift = j.at("drift").get<Drift>();
  v.rng_seed = j.at("rng_seed").get<std::uint64_t>();
}

void to_json(json& j, const CampaignSpec& v) {
  j = {{"campaign_id", v.campaign_id},   {"budget", v.budget},
       {"cpc_cap", v.cpc_cap},           {"step_seconds", v.step_seconds},
       {"num_steps", v.num_steps}};
}
void from_json(const json& j, CampaignSpec& v) {
  v.campaign_id = j.value("campaign_id", std::string("campaign"));
  v.budget = j.at("budget").get<double>();
  v.cpc_cap = j.at("cpc_cap").get<double>();
  v.step_seconds = j.value("step_seconds", 3600);
  v.num_steps = j.value("num_steps", 24);
}

void to_json(json& j, const DualSolution& v) {
  j = {{"p", v.p},
       {"q", v.q},
       {"dual_objective", v.dual_objective},
       {"iterations", v.iterations},
       {"tolerance_achieved", v.tolerance_achieved}};
}
void from_json(const json& j, DualSolution& v) {
  v.p = j.at("p").get<double>();
  v.q = j.at("q").get<double>();
  v.dual_objective = j.at("dual_objective").get<double>();
  v.iterations = j.at("iterations").get<int>();
  v.tolerance_achieved = j.at("tolerance_achieved").get<double>();
}

void to_json(json& j, const PidGains& v) { j = {{"kp", v.kp}, {"ki", v.ki}, {"kd", v.kd}}; }
void from_json(const json& j, PidGains& v) {
  v.kp = j.at("kp").get<double>();
  v.ki = j.at("ki").get<double>();
  v.kd = j.at("kd").get<double>();
}

void to_json(json& j, const MpcWeights& v) { j = {{"alpha", v.alpha}, {"beta", v.beta}}; }
void from_json(const json& j, MpcWeights& v) {
  v.alpha = j.at("alpha").get<double>();
  v.beta = j.at("beta").get<double>();
}

void to_json(json& j, const PidLimits& v) {
  j = {{"integral_clamp", v.integral_clamp}, {"signal_clamp", v.signal_clamp}};
}
void from_json(const json& j, PidLimits& v) {
  v.integral_clamp = j.at("integral_clamp").get<double>();
  v.signal_clamp = j.at("signal_clamp").get<double>();
}

void to_json(json& j, const ControlConfig& v) {
  j = {{"p_gains", v.p_gains}, {"q_gains", v.q_gains}, {"weights", v.weights}, {"limits", v.limits}};
}
void from_json(const json& j, ControlConfig& v) {
  v.p_gains = j.at("p_gains").get<PidGains>();
  v.q_gains = j.at("q_gains").get<PidGains>();
  v.weights = j.contains("weights") ? j.at("weights").get<MpcWeights>() : MpcWeights{};
  v.limits = j.contains("limits") ? j.at("limits").get<PidLimits>() : PidLimits{};
}

void to_json(json& j, const TunedConfig& v) {
  json pooled = json::object();
  for (const auto& [k, c] : v.pooled) pooled[std::string(to_string(k))] = c;
  json per = json::object();
  for (const auto& [id, m] : v.per_campaign) {
    json inner = json::object();
    for (const auto& [k, c] : m) inner[std::string(to_string(k))] = c;
    per[id] = inner;
  }
  j = {{"pooled", pooled}, {"per_campaign", per}};
}
void from_json(const json& j, TunedConfig& v) {
  v = {};
  for (const auto& [name, c] : j.at("pooled").items())
    v.pooled[parse_strategy(name)] = c.get<ControlConfig>();
  if (j.contains("per_campaign")) {
    for (const auto& [id, m] : j.at("per_campaign").items())
      for (const auto& [name, c] : m.items())
        v.per_campaign[id][parse_strategy(name)] = c.get<ControlConfig>();
  }
}

void to_json(json& j, const SearchSpace& v) {
  j = {{"kp", v.kp}, {"ki", v.ki}, {"kd", v.kd}, {"alpha", v.alpha}, {"beta", v.beta}};
}
void from_json(const json& j, SearchSpace& v) {
  SearchSpace d;
  v.kp = j.value("kp", d.kp);
  v.ki = j.value("ki", d.ki);
  v.kd = j.value("kd", d.kd);
  v.alpha = j.value("alpha", d.alpha);
  v.beta = j.value("beta", d.beta);
}

#define MVBID_BATCH_FIELDS(X)                                                              \
  X(n_campaigns) X(seed) X(n_min) X(n_max) X(num_steps) X(first_cpc_cap) X(cpc_cap_min)    \
  X(cpc_cap_max) X(budget_fraction_min) X(budget_fraction_max) X(ctr_mean_min)             \
  X(ctr_mean_max) X(cvr_mean_min) X(cvr_mean_max) X(cvr_shape_a)                     \
  X(ctr_concentration) X(click_price_min) X(click_price_max) X(wp_ctr_exponent_min)        \
  X(wp_ctr_exponent_max) X(wp_cvr_exponent_min) X(wp_cvr_exponent_max) X(wp_noise_min) X(wp_noise_max) X(test_wp_factor)                 \
  X(test_volume_amplitude) X(tune_wp_factor_min) X(tune_wp_factor_max)                     \
  X(tune_volume_amplitude_max)

void to_json(json& j, const BatchConfig& v) {
  j = json::object();
#define X(f) j[#f] = v.f;
  MVBID_BATCH_FIELDS(X)
#undef X
}
void from_json(const json& j, BatchConfig& v) {
  const BatchConfig d;
#define X(f) v.f = j.value(#f, d.f);
  MVBID_BATCH_FIELDS(X)
#undef X
}

void to_json(json& j, const CampaignResult& v) {
  j = {{"campaign_id", v.campaign_id},
       {"strategy", v.strategy},
       {"R", v.R},
       {"R_star", v.R_star},
       {"value_fraction", v.value_fraction},
       {"cpc", v.cpc ? json(*v.cpc) : json(nullptr)},
       {"cpc_satisfied", v.cpc_satisfied},
       {"cost", v.cost},
       {"budget", v.budget},
       {"cpc_cap", v.cpc_cap},
       {"termination", std::string(to_string(v.termination))}};
}

void to_json(json& j, const StrategySummary& v) {
  j = {{"strategy", v.strategy},
       {"campaigns", v.campaigns},
       {"CPC_ratio", v.cpc_ratio},
       {"Value_ratio", v.value_ratio}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_report_csv(std::ostream& out, const BatchReport& report) {
  out << "strategy,CPC_ratio,Value_ratio\n";
  for (const auto& s : report.strategies)
    out << s.strategy << ',' << format_real(s.cpc_ratio) << ',' << format_real(s.value_ratio)
        << '\n';
}

void write_campaigns_jsonl(std::ostream& out, const BatchReport& report) {
  for (const auto& r : report.campaigns) out << json(r).dump() << '\n';
}

}  // namespace mvbid
