// Serial reference vs OpenMP kernels: hinge sum, batch generation, batch evaluation.
#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "mvbid/experiment.hpp"
#include "mvbid/synthetic.hpp"

using namespace mvbid;

namespace {

double seconds(const std::function<void()>& fn, int reps) {
  fn();
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

void row(const char* name, double serial, double parallel, const char* check) {
  std::printf("%-16s serial %9.3f ms  parallel %9.3f ms  speedup %5.2fx  %s\n", name,
              serial * 1e3, parallel * 1e3, serial / parallel, check);
}

const char* verdict(bool same) { return same ? "identical" : "DIFFERENT"; }

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1'000'000;
  std::printf("threads %d, opportunities %zu\n", omp_get_max_threads(), n);

  auto recipe = make_batch_recipes(BatchConfig{})[0];
  recipe.day.n_opportunities = n;
  const BidLog log = generate_log(recipe.day, DayKind::train);
  CampaignSpec spec = recipe.spec;
  for (const auto& o : log) spec.budget += 0.05 * o.wp;
  const DualTerms terms = DualTerms::from(log, spec);

  double hs = 0.0, hp = 0.0;
  const double ts = seconds([&] { hs = hinge_sum_serial(terms, 1e-4, 2e-5); }, 20);
  const double tp = seconds([&] { hp = hinge_sum_parallel(terms, 1e-4, 2e-5); }, 20);
  char rel[64];
  std::snprintf(rel, sizeof rel, "rel diff %.2e", std::abs(hs - hp) / std::abs(hs));
  row("hinge_sum", ts, tp, rel);

  BatchConfig batch;
  batch.n_campaigns = 6;
  batch.n_min = batch.n_max = 20000;
  std::vector<CampaignData> gs, gp;
  const double bs = seconds([&] { gs = generate_batch(batch, Execution::serial); }, 1);
  const double bp = seconds([&] { gp = generate_batch(batch, Execution::parallel); }, 1);
  bool same_batch = gs.size() == gp.size();
  for (std::size_t i = 0; same_batch && i < gs.size(); ++i)
    same_batch = gs[i].spec == gp[i].spec && gs[i].test.opportunities() == gp[i].test.opportunities();
  row("generate_batch", bs, bp, verdict(same_batch));

  const auto prepared = prepare_batch(std::move(gp));
  TunedConfig tuned;
  for (auto kind : kAllStrategies) {
    if (!is_controlled(kind)) continue;
    auto& c = tuned.pooled[kind];
    c.p_gains.ki = 0.3;
    c.q_gains.ki = 1.0;
  }
  const std::vector<StrategyKind> kinds(std::begin(kAllStrategies), std::end(kAllStrategies));
  BatchReport rs, rp;
  const double es = seconds([&] { rs = evaluate_batch(prepared, kinds, tuned, Execution::serial); }, 2);
  const double ep = seconds([&] { rp = evaluate_batch(prepared, kinds, tuned, Execution::parallel); }, 2);
  bool same = rs.campaigns.size() == rp.campaigns.size();
  for (std::size_t i = 0; same && i < rs.campaigns.size(); ++i)
    same = rs.campaigns[i].R == rp.campaigns[i].R && rs.campaigns[i].cost == rp.campaigns[i].cost;
  row("evaluate_batch", es, ep, verdict(same));
}
