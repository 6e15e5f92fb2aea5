#include "mvbid/synthetic.hpp"

#include <cmath>
#include <numeric>
#include <random>

namespace mvbid {

void validate(const SyntheticConfig& cfg) {
  if (cfg.n_opportunities == 0) throw DataError("synthetic: n_opportunities must be positive");
  const auto steps = cfg.volume_profile.size();
  if (steps == 0 || kSecondsPerDay % static_cast<int>(steps) != 0)
    throw DataError("synthetic: volume_profile length must divide 86400");
  double total = 0.0;
  for (double w : cfg.volume_profile) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DataError("synthetic: negative volume weight");
    total += w;
  }
  if (total <= 0.0) throw DataError("synthetic: volume_profile is all zero");
  if (std::abs(total - 1.0) > 1e-6) throw DataError("synthetic: volume_profile must sum to 1");
  for (const auto* s : {&cfg.ctr_shape, &cfg.cvr_shape})
    if (!(s->a > 0.0 && s->b > 0.0)) throw DataError("synthetic: beta shapes must be positive");
  if (!(cfg.wp_base > 0.0)) throw DataError("synthetic: wp_base must be positive");
  if (!(cfg.wp_ctr_exponent >= 0.0)) throw DataError("synthetic: wp_ctr_exponent must be >= 0");
  if (!(cfg.wp_cvr_exponent >= 0.0)) throw DataError("synthetic: wp_cvr_exponent must be >= 0");
  if (!(cfg.wp_noise_sigma >= 0.0)) throw DataError("synthetic: wp_noise_sigma must be >= 0");
  if (!(cfg.drift.wp_factor > 0.0)) throw DataError("synthetic: drift wp_factor must be positive");
  if (!cfg.drift.volume_factors.empty()) {
    if (cfg.drift.volume_factors.size() != steps)
      throw DataError("synthetic: drift volume_factors must match volume_profile length");
    for (double f : cfg.drift.volume_factors)
      if (!(f >= 0.0)) throw DataError("synthetic: drift volume factor must be >= 0");
  }
}

std::vector<double> effective_profile(const SyntheticConfig& cfg, DayKind kind) {
  std::vector<double> w = cfg.volume_profile;
  if (kind == DayKind::test && !cfg.drift.volume_factors.empty()) {
    for (std::size_t t = 0; t < w.size(); ++t) w[t] *= cfg.drift.volume_factors[t];
  }
  double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (total <= 0.0) throw DataError("synthetic: drifted volume profile is all zero");
  for (double& x : w) x /= total;
  return w;
}

namespace {

double draw_beta(std::mt19937_64& rng, const BetaShape& shape) {
  std::gamma_distribution<double> ga(shape.a, 1.0), gb(shape.b, 1.0);
  double x = ga(rng), y = gb(rng);
  double s = x + y;
  return s > 0.0 ? x / s : shape.mean();
}

}  // namespace

BidLog generate_log(const SyntheticConfig& cfg, DayKind kind) {
  validate(cfg);
  const auto profile = effective_profile(cfg, kind);
  const int step_seconds = kSecondsPerDay / static_cast<int>(profile.size());
  const double wp_factor = kind == DayKind::test ? cfg.drift.wp_factor : 1.0;
  const double mean_ctr = cfg.ctr_shape.mean();
  const double mean_cvr = cfg.cvr_shape.mean();

  std::seed_seq seq{static_cast<std::uint32_t>(cfg.rng_seed),
                    static_cast<std::uint32_t>(cfg.rng_seed >> 32),
                    kind == DayKind::train ? 0x7261696eu : 0x74657374u};
  std::mt19937_64 rng(seq);
  std::discrete_distribution<int> step_dist(profile.begin(), profile.end());
  std::uniform_int_distribution<int> offset_dist(0, step_seconds - 1);
  std::normal_distribution<double> noise(0.0, 1.0);

  std::vector<Opportunity> opps;
  opps.reserve(cfg.n_opportunities);
  for (std::size_t i = 0; i < cfg.n_opportunities; ++i) {
    Opportunity o;
    o.id = static_cast<std::int64_t>(i + 1);
    o.timestamp = step_dist(rng) * step_seconds + offset_dist(rng);
    o.ctr = draw_beta(rng, cfg.ctr_shape);
    o.cvr = draw_beta(rng, cfg.cvr_shape);
    const double z = noise(rng);
    double wp = cfg.wp_base * wp_factor;
    if (cfg.wp_ctr_exponent != 0.0) wp *= std::pow(o.ctr / mean_ctr, cfg.wp_ctr_exponent);
    if (cfg.wp_cvr_exponent != 0.0) wp *= std::pow(o.cvr / mean_cvr, cfg.wp_cvr_exponent);
    if (cfg.wp_noise_sigma != 0.0) wp *= std::exp(cfg.wp_noise_sigma * z);
    // A ctr or cvr that underflows to zero would zero the price.
    o.wp = wp > 0.0 && std::isfinite(wp) ? wp : cfg.wp_base * wp_factor * 1e-9;
    opps.push_back(o);
  }
  return BidLog(std::move(opps), kind == DayKind::train ? "train" : "test");
}

}  // namespace mvbid
