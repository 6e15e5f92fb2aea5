#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "mvbid/batch_io.hpp"
#include "mvbid/json_io.hpp"

using namespace mvbid;
namespace fs = std::filesystem;

namespace {

CampaignResult result(const std::string& id, double r, double r_star, double cpc, double cap) {
  CampaignResult c;
  c.campaign_id = id;
  c.strategy = "m-pid";
  c.R = r;
  c.R_star = r_star;
  c.value_fraction = r / r_star;
  c.cpc = cpc;
  c.cpc_cap = cap;
  c.cpc_satisfied = cpc <= kCpcOvershootMargin * cap;
  return c;
}

CampaignContext toy_context() {
  CampaignContext ctx;
  ctx.spec.budget = 240.0;
  ctx.spec.cpc_cap = 200.0;
  ctx.dual = {1e-3, 2e-3, 0.5, 0, 0};
  ctx.refs.cost_ref.assign(24, 10.0);
  ctx.refs.cpc_ref = 200.0;
  ctx.mean_cvr = 0.02;
  ctx.p_scale = 0.1;
  return ctx;
}

std::vector<PreparedCampaign>& small_prepared() {
  static auto prepared = prepare_batch(generate_batch(fixtures::small_batch()));
  return prepared;
}

SearchSpace tiny_space() {
  SearchSpace s;
  s.kp = {0.0, 0.1};
  s.ki = {0.0, 0.3};
  s.kd = {0.0};
  s.alpha = {0.5, 1.0};
  s.beta = {0.5, 1.0};
  return s;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("mvbid_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("strategy names") {
  for (auto k : kAllStrategies) CHECK(parse_strategy(to_string(k)) == k);
  CHECK_THROWS_AS(parse_strategy("nope"), UsageError);
  CHECK_FALSE(is_controlled(StrategyKind::optimal_static));
  CHECK(is_controlled(StrategyKind::fb_control_m));
}

TEST_CASE("baseline starting points") {
  const auto ctx = toy_context();
  auto snap = make_strategy(StrategyKind::cost_min, ctx)->snapshot();
  CHECK(*snap.b0 == doctest::Approx(10000.0));
  CHECK(*snap.cap == 200.0);
  snap = make_strategy(StrategyKind::fb_control, ctx)->snapshot();
  CHECK(*snap.b0 == 200.0);
  CHECK_FALSE(snap.cap.has_value());
  snap = make_strategy(StrategyKind::fb_control_m, ctx)->snapshot();
  CHECK(*snap.b0 == doctest::Approx(10000.0));
  CHECK(*snap.cap == 200.0);
  snap = make_strategy(StrategyKind::i_pid, ctx)->snapshot();
  CHECK(*snap.p == 1e-3);
  CHECK(*snap.q == 2e-3);
}

TEST_CASE("controller start floors a zero dual coordinate") {
  auto ctx = toy_context();
  ctx.dual.q = 0.0;
  auto start = initial_control_params(ctx);
  CHECK(start.p == 1e-3);
  CHECK(start.q == doctest::Approx(1e-5));
  ctx.dual.p = 0.0;
  start = initial_control_params(ctx);
  CHECK(start.p == doctest::Approx(1e-3));
  CHECK(start.q == doctest::Approx(1e-3));
}

TEST_CASE("cost-min cap stays at C") {
  const auto& c = small_prepared()[0];
  ControlConfig cfg;
  cfg.p_gains = {0.3, 0.3, 0.0};
  SimulationTrace trace;
  run_prepared(c, EvalDay::test, StrategyKind::cost_min, cfg, &trace);
  for (const auto& rec : trace.steps) CHECK(*rec.control.cap == c.data.spec.cpc_cap);
}

TEST_CASE("metric definitions") {
  std::vector<CampaignResult> rs{result("a", 8, 10, 100, 100), result("b", 9, 10, 105, 100),
                                 result("c", 5, 10, 90, 100), result("d", 10, 10, 120, 100)};
  auto s = summarize_results("m-pid", rs);
  CHECK(s.campaigns == 4);
  CHECK(s.cpc_ratio == doctest::Approx(0.75));
  CHECK(s.value_ratio == doctest::Approx((0.8 + 0.9 + 0.5) / 3.0));
  rs.pop_back();
  const auto without = summarize_results("m-pid", rs);
  CHECK(without.value_ratio == s.value_ratio);
  CHECK(without.cpc_ratio == 1.0);
}

TEST_CASE("score_campaign edge cases") {
  SimulationTrace t;
  t.steps.resize(24);
  CampaignSpec spec;
  spec.cpc_cap = 100.0;
  auto r = score_campaign(spec, "cost-min", t, 0.0);
  CHECK(r.value_fraction == 1.0);
  CHECK(r.cpc_satisfied);
  CHECK_FALSE(r.cpc.has_value());
  t.cost = 111.0;
  t.clicks = 1.0;
  t.cpc = 111.0;
  t.value = 1.0;
  r = score_campaign(spec, "cost-min", t, 2.0);
  CHECK_FALSE(r.cpc_satisfied);
  CHECK(r.value_fraction == 0.5);
}

TEST_CASE("zero budget run") {
  const auto data = materialize(make_batch_recipes(fixtures::small_batch(1))[0]);
  auto spec = data.spec;
  spec.budget = 0.0;
  const auto r = run_campaign(data.train, data.test, spec, StrategyKind::optimal_static);
  CHECK(r.R == 0.0);
  CHECK(r.cpc_satisfied);
}

TEST_CASE("static optimum replayed on its own training day") {
  for (const auto& c : small_prepared()) {
    const auto r = run_campaign(c.data.train, c.data.train, c.data.spec, StrategyKind::optimal_static);
    CHECK(r.value_fraction >= 0.95);
    CHECK(r.cost <= c.data.spec.budget);
  }
}

TEST_CASE("identical inputs give identical results") {
  const auto& c = small_prepared()[1];
  ControlConfig cfg;
  cfg.p_gains.ki = 0.3;
  cfg.q_gains.ki = 1.0;
  CHECK(run_prepared(c, EvalDay::test, StrategyKind::i_pid, cfg) ==
        run_prepared(c, EvalDay::test, StrategyKind::i_pid, cfg));
}

TEST_CASE("tuning rules") {
  CHECK(better({1.0, 0.5}, {0.9, 0.99}));
  CHECK_FALSE(better({0.9, 0.99}, {1.0, 0.5}));
  CHECK(better({1.0, 0.6}, {1.0, 0.5}));
  CHECK_FALSE(better({1.0, 0.5}, {1.0, 0.5}));

  SearchSpace single;
  single.kp = {0.1};
  single.ki = {0.3};
  single.kd = {0.0};
  single.alpha = {0.5};
  single.beta = {0.75};
  const auto& prepared = small_prepared();
  const auto one = grid_search(prepared, StrategyKind::m_pid, single);
  CHECK(one.config.p_gains == PidGains{0.1, 0.3, 0.0});
  CHECK(one.config.q_gains == PidGains{0.1, 0.3, 0.0});
  CHECK(one.config.weights == MpcWeights{0.5, 0.75});

  const auto base = grid_search(prepared, StrategyKind::i_pid, tiny_space());
  const auto mixed = grid_search(prepared, StrategyKind::m_pid, tiny_space());
  CHECK_FALSE(better(base.score, mixed.score));
  CHECK(grid_search(prepared, StrategyKind::i_pid, tiny_space()).config == base.config);
  CHECK(grid_search(prepared, StrategyKind::i_pid, tiny_space(), Execution::serial).config == base.config);
}

TEST_CASE("evaluation report") {
  const auto& prepared = small_prepared();
  const std::vector<StrategyKind> kinds(std::begin(kAllStrategies), std::end(kAllStrategies));
  const auto tuned = tune_all(prepared, {StrategyKind::i_pid, StrategyKind::m_pid, StrategyKind::cost_min,
                                         StrategyKind::fb_control, StrategyKind::fb_control_m},
                              tiny_space());
  const auto report = evaluate_batch(prepared, kinds, tuned);
  CHECK(report.strategies.size() == 6);
  CHECK(report.campaigns.size() == 6 * prepared.size());
  CHECK(evaluate_batch(prepared, kinds, tuned, Execution::serial) == report);
  CHECK(evaluate_batch(prepared, {}, tuned).strategies.empty());

  for (const auto& r : report.campaigns) {
    CHECK(r.cost <= r.budget);
    // Any run inside both constraints is a feasible allocation of the test LP.
    if (r.cpc && *r.cpc <= r.cpc_cap) CHECK(r.R <= r.R_star * (1.0 + 1e-9));
  }

  std::ostringstream csv;
  write_report_csv(csv, report);
  std::istringstream in(csv.str());
  std::string line;
  int rows = 0;
  std::getline(in, line);
  CHECK(line == "strategy,CPC_ratio,Value_ratio");
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 6);

  CHECK_THROWS_AS(evaluate_batch(prepared, kinds, TunedConfig{}), UsageError);
}

TEST_CASE("batch generation is deterministic and thread-independent") {
  const auto cfg = fixtures::small_batch(4, 2000);
  const auto a = generate_batch(cfg, Execution::serial);
  const auto b = generate_batch(cfg, Execution::parallel);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].spec == b[i].spec);
    CHECK(a[i].train == b[i].train);
    CHECK(a[i].tune == b[i].tune);
    CHECK(a[i].test == b[i].test);
  }
  CHECK(a[0].spec.cpc_cap == cfg.first_cpc_cap);
}

TEST_CASE("batch budgets sit inside the cpc-limited spend") {
  const auto cfg = fixtures::small_batch(4, 3000);
  const auto recipes = make_batch_recipes(cfg);
  for (const auto& r : recipes) {
    const auto data = materialize(r);
    const double limit = cpc_limited_spend(data.train, data.spec);
    CHECK(data.spec.budget == doctest::Approx(r.budget_fraction * limit));
    CHECK(r.budget_fraction >= cfg.budget_fraction_min);
    CHECK(r.budget_fraction <= cfg.budget_fraction_max);
  }
}

TEST_CASE("volume reshape") {
  const auto v = volume_reshape(24, 0.3, 0.0);
  CHECK(v.size() == 24);
  CHECK(v[0] == doctest::Approx(1.0));
  CHECK(v[6] == doctest::Approx(1.3));
  CHECK(v[18] == doctest::Approx(0.7));
}

TEST_CASE("json round trips") {
  const auto recipe = make_batch_recipes(fixtures::small_batch(1))[0];
  CHECK(json(recipe.day).get<SyntheticConfig>() == recipe.day);
  CHECK(json(recipe.spec).get<CampaignSpec>() == recipe.spec);
  const DualSolution d{1e-4, 3e-5, 12.5, 80, 1e-9};
  CHECK(json(d).get<DualSolution>() == d);
  ControlConfig c;
  c.p_gains = {0.1, 0.2, 0.3};
  c.q_gains = {1, 2, 3};
  c.weights = {0.25, 0.75};
  CHECK(json(c).get<ControlConfig>() == c);
  TunedConfig t;
  t.pooled[StrategyKind::m_pid] = c;
  t.per_campaign["c3"][StrategyKind::cost_min] = c;
  CHECK(json(t).get<TunedConfig>() == t);
  CHECK(json(tiny_space()).get<SearchSpace>() == tiny_space());
  BatchConfig b;
  b.seed = 99;
  CHECK(json(b).get<BatchConfig>() == b);
  CHECK(json::object().get<BatchConfig>() == BatchConfig{});
}

TEST_CASE("json readers reject missing or mistyped fields") {
  json j = make_batch_recipes(fixtures::small_batch(1))[0].day;
  j.erase("wp_cvr_exponent");
  CHECK(parse_as<SyntheticConfig>(j, "cfg").wp_cvr_exponent == 0.0);
  j.erase("wp_base");
  CHECK_THROWS_AS(parse_as<SyntheticConfig>(j, "cfg"), DataError);
  CHECK_THROWS_AS(parse_as<CampaignSpec>(json{{"budget", 1.0}}, "spec"), DataError);
  CHECK_THROWS_AS(parse_as<BatchConfig>(json{{"seed", "x"}}, "batch"), DataError);
  CHECK_THROWS_AS(parse_as<TunedConfig>(json{{"pooled", {{"bogus", json::object()}}}}, "tuned"), std::exception);
}

TEST_CASE("batch directory round trip") {
  const auto dir = scratch("batch");
  const auto batch = generate_batch(fixtures::small_batch(2, 1500));
  for (auto format : {LogFormat::csv, LogFormat::jsonl}) {
    fs::remove_all(dir);
    const auto written = write_batch(dir, batch, format);
    CHECK(written.size() == 1 + 3 * batch.size());
    const auto back = read_batch(dir);
    REQUIRE(back.size() == batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      CHECK(back[i].spec == batch[i].spec);
      CHECK(back[i].train == batch[i].train);
      CHECK(back[i].tune == batch[i].tune);
      CHECK(back[i].test == batch[i].test);
    }
  }
  fs::remove(dir / "c1" / "test.jsonl");
  CHECK_THROWS_AS(read_batch(dir), DataError);
  CHECK_THROWS_AS(read_batch(dir / "missing"), DataError);
  fs::remove_all(dir);
}
