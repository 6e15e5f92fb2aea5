#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "mvbid/batch_io.hpp"
#include "mvbid/bid_log.hpp"
#include "mvbid/dual.hpp"
#include "mvbid/experiment.hpp"
#include "mvbid/json_io.hpp"
#include "mvbid/synthetic.hpp"

namespace fs = std::filesystem;
using namespace mvbid;

namespace {

constexpr const char* kToolName = "mvbid";

// Every command is a pure function of (params, out_dir). The manifest records
// the params verbatim so `rerun` can replay the command from it alone.
void write_manifest(const fs::path& out, const std::string& command, const json& params,
                    const std::vector<fs::path>& outputs) {
  json files = json::array();
  for (const auto& p : outputs) files.push_back(p.generic_string());
  write_json_file(out / "manifest.json", {{"tool", kToolName},
                                          {"schema_version", kSchemaVersion},
                                          {"command", command},
                                          {"params", params},
                                          {"outputs", files}});
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  return f;
}

LogFormat parse_format(const std::string& name) {
  if (name == "csv") return LogFormat::csv;
  if (name == "jsonl") return LogFormat::jsonl;
  throw UsageError("unknown format '" + name + "' (expected csv or jsonl)");
}

const char* extension(LogFormat f) { return f == LogFormat::csv ? ".csv" : ".jsonl"; }

std::string absolute(const std::string& p) { return fs::absolute(p).lexically_normal().string(); }

void run_gen(const json& params, const fs::path& out) {
  const auto cfg = parse_as<SyntheticConfig>(params.at("config"), "synthetic config");
  const auto format = parse_format(params.at("format").get<std::string>());
  fs::create_directories(out);
  const fs::path train = std::string("train") + extension(format);
  const fs::path test = std::string("test") + extension(format);
  write_log(out / train, generate_log(cfg, DayKind::train));
  write_log(out / test, generate_log(cfg, DayKind::test));
  write_manifest(out, "gen", params, {train, test});
}

void run_gen_batch(const json& params, const fs::path& out) {
  const auto cfg = parse_as<BatchConfig>(params.at("batch"), "batch config");
  const auto format = parse_format(params.at("format").get<std::string>());
  const auto written = write_batch(out, generate_batch(cfg), format);
  write_manifest(out, "gen-batch", params, written);
}

void run_solve(const json& params, const fs::path& out) {
  const auto log = load_log(params.at("log").get<std::string>());
  CampaignSpec spec;
  spec.budget = params.at("budget").get<double>();
  spec.cpc_cap = params.at("cpc").get<double>();
  validate(spec);
  DualSolveOptions options;
  if (params.contains("tol") && !params.at("tol").is_null()) options.tol = params.at("tol").get<double>();
  const auto sol = solve_dual(log, spec, options);
  std::cout << "p=" << format_real(sol.p) << " q=" << format_real(sol.q)
            << " R*=" << format_real(sol.dual_objective) << '\n';
  fs::create_directories(out);
  write_json_file(out / "solution.json", sol);
  write_manifest(out, "solve", params, {"solution.json"});
}

void run_simulate(const json& params, const fs::path& out) {
  const auto spec = parse_as<CampaignSpec>(params.at("spec"), "campaign spec");
  validate(spec);
  const auto kind = parse_strategy(params.at("strategy").get<std::string>());
  const auto config = parse_as<ControlConfig>(params.at("control"), "control config");
  const auto train = load_log(params.at("train").get<std::string>(), {}, "train");
  const auto test = load_log(params.at("test").get<std::string>(), {}, "test");
  SimulationTrace trace;
  const auto result = run_campaign(train, test, spec, kind, config, &trace);
  fs::create_directories(out);
  {
    auto f = open_out(out / "trace.jsonl");
    write_trace_jsonl(f, trace);
  }
  write_json_file(out / "result.json", result);
  std::cout << result.strategy << " R=" << format_real(result.R)
            << " R*=" << format_real(result.R_star)
            << " cpc=" << (result.cpc ? format_real(*result.cpc) : std::string("undefined"))
            << " cost=" << format_real(result.cost) << '\n';
  write_manifest(out, "simulate", params, {"trace.jsonl", "result.json"});
}

std::vector<StrategyKind> controlled_strategies() {
  std::vector<StrategyKind> kinds;
  for (auto k : kAllStrategies)
    if (is_controlled(k)) kinds.push_back(k);
  return kinds;
}

void run_tune(const json& params, const fs::path& out) {
  const auto space = parse_as<SearchSpace>(params.at("grid"), "search space");
  const bool per_campaign = params.at("per_campaign").get<bool>();
  auto prepared = prepare_batch(read_batch(params.at("batch").get<std::string>()));
  const auto tuned = tune_all(prepared, controlled_strategies(), space, per_campaign);
  fs::create_directories(out);
  write_json_file(out / "tuned.json", tuned);
  write_manifest(out, "tune", params, {"tuned.json"});
}

void write_report(const fs::path& out, const BatchReport& report) {
  {
    auto f = open_out(out / "report.csv");
    write_report_csv(f, report);
  }
  auto f = open_out(out / "campaigns.jsonl");
  write_campaigns_jsonl(f, report);
}

void print_report(const BatchReport& report) {
  for (const auto& s : report.strategies)
    std::cout << s.strategy << " CPC_ratio=" << format_real(s.cpc_ratio)
              << " Value_ratio=" << format_real(s.value_ratio) << '\n';
}

std::vector<StrategyKind> all_strategies() {
  return {std::begin(kAllStrategies), std::end(kAllStrategies)};
}

void run_evaluate(const json& params, const fs::path& out) {
  const auto tuned = parse_as<TunedConfig>(params.at("tuned"), "tuned config");
  auto prepared = prepare_batch(read_batch(params.at("batch").get<std::string>()));
  const auto report = evaluate_batch(prepared, all_strategies(), tuned);
  fs::create_directories(out);
  write_report(out, report);
  print_report(report);
  write_manifest(out, "evaluate", params, {"report.csv", "campaigns.jsonl"});
}

void run_pipeline(const json& params, const fs::path& out) {
  const auto cfg = parse_as<BatchConfig>(params.at("batch"), "batch config");
  const auto space = parse_as<SearchSpace>(params.at("grid"), "search space");
  const bool per_campaign = params.at("per_campaign").get<bool>();
  auto batch = generate_batch(cfg);
  auto written = write_batch(out / "batch", batch);
  for (auto& p : written) p = fs::path("batch") / p;
  auto prepared = prepare_batch(std::move(batch));
  const auto tuned = tune_all(prepared, controlled_strategies(), space, per_campaign);
  write_json_file(out / "tuned.json", tuned);
  const auto report = evaluate_batch(prepared, all_strategies(), tuned);
  write_report(out, report);
  print_report(report);
  written.insert(written.end(), {"tuned.json", "report.csv", "campaigns.jsonl"});
  write_manifest(out, "pipeline", params, written);
}

void dispatch(const std::string& command, const json& params, const fs::path& out) {
  if (command == "gen") return run_gen(params, out);
  if (command == "gen-batch") return run_gen_batch(params, out);
  if (command == "solve") return run_solve(params, out);
  if (command == "simulate") return run_simulate(params, out);
  if (command == "tune") return run_tune(params, out);
  if (command == "evaluate") return run_evaluate(params, out);
  if (command == "pipeline") return run_pipeline(params, out);
  throw UsageError("manifest names unknown command '" + command + "'");
}

json read_config(const std::string& path) { return path.empty() ? json::object() : read_json_file(path); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budget- and CPC-constrained bid optimization: data generation, dual solving, "
               "simulation, tuning and evaluation."};
  app.require_subcommand(1);

  std::string out;
  std::string format = "csv";
  std::string config_path;
  std::optional<std::uint64_t> seed;

  auto* gen = app.add_subcommand("gen", "Generate a synthetic train/test log pair");
  gen->add_option("--config", config_path, "Synthetic config (JSON)")->required();
  gen->add_option("--seed", seed, "Override rng_seed");
  gen->add_option("--out", out, "Output directory")->required();
  gen->add_option("--format", format, "csv or jsonl");

  auto* gen_batch = app.add_subcommand("gen-batch", "Generate a campaign batch");
  gen_batch->add_option("--config", config_path, "Batch config (JSON); defaults when omitted");
  gen_batch->add_option("--seed", seed, "Override the batch seed");
  gen_batch->add_option("--out", out, "Output directory")->required();
  gen_batch->add_option("--format", format, "csv or jsonl");

  std::string log_path;
  double budget = 0.0, cpc = 0.0;
  std::optional<double> tol;
  auto* solve = app.add_subcommand("solve", "Solve the dual problem on one log");
  solve->add_option("--log", log_path, "Bid log (CSV or JSONL)")->required();
  solve->add_option("--budget", budget, "Budget B")->required();
  solve->add_option("--cpc", cpc, "CPC cap C")->required();
  solve->add_option("--tol", tol, "Objective tolerance");
  solve->add_option("--out", out, "Output directory")->required();

  std::string train_path, test_path, strategy = "optimal-static", tuned_path, campaign_id = "campaign";
  int step_seconds = 3600, num_steps = 24;
  std::optional<double> alpha, beta;
  auto* simulate = app.add_subcommand("simulate", "Replay one strategy on a test log");
  simulate->add_option("--train", train_path, "Training log")->required();
  simulate->add_option("--test", test_path, "Test log")->required();
  simulate->add_option("--budget", budget, "Budget B")->required();
  simulate->add_option("--cpc", cpc, "CPC cap C")->required();
  simulate->add_option("--campaign-id", campaign_id, "Campaign id for tuned-config lookup");
  simulate->add_option("--step-seconds", step_seconds, "Control step length");
  simulate->add_option("--num-steps", num_steps, "Control steps per day");
  simulate->add_option("--strategy", strategy,
                       "optimal-static, i-pid, m-pid, cost-min, fb-control or fb-control-m");
  simulate->add_option("--tuned", tuned_path, "Tuned config from `tune`");
  simulate->add_option("--control", config_path, "Single control config (JSON)");
  simulate->add_option("--alpha", alpha, "Override alpha");
  simulate->add_option("--beta", beta, "Override beta");
  simulate->add_option("--out", out, "Output directory")->required();

  std::string batch_dir, grid_path;
  bool per_campaign = false;
  auto* tune = app.add_subcommand("tune", "Grid-search controller settings on a batch");
  tune->add_option("--batch", batch_dir, "Batch directory from gen-batch")->required();
  tune->add_option("--grid", grid_path, "Search space (JSON); defaults when omitted");
  tune->add_flag("--per-campaign", per_campaign, "Also tune each campaign separately");
  tune->add_option("--out", out, "Output directory")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate all strategies on a batch");
  evaluate->add_option("--batch", batch_dir, "Batch directory from gen-batch")->required();
  evaluate->add_option("--tuned", tuned_path, "Tuned config from `tune`")->required();
  evaluate->add_option("--out", out, "Output directory")->required();

  auto* pipeline = app.add_subcommand("pipeline", "gen-batch, tune and evaluate in one run");
  pipeline->add_option("--config", config_path, "Batch config (JSON); defaults when omitted");
  pipeline->add_option("--seed", seed, "Override the batch seed");
  pipeline->add_option("--grid", grid_path, "Search space (JSON); defaults when omitted");
  pipeline->add_flag("--per-campaign", per_campaign, "Also tune each campaign separately");
  pipeline->add_option("--out", out, "Output directory")->required();

  std::string manifest_path;
  auto* rerun = app.add_subcommand("rerun", "Repeat a run from its manifest");
  rerun->add_option("manifest", manifest_path, "manifest.json of an earlier run")->required();
  rerun->add_option("--out", out, "Output directory; defaults to the manifest's directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (gen->parsed()) {
      json cfg = read_config(config_path);
      if (seed) cfg["rng_seed"] = *seed;
      json params = {{"config", parse_as<SyntheticConfig>(cfg, config_path.c_str())},
                     {"format", format}};
      parse_format(format);
      run_gen(params, out);
    } else if (gen_batch->parsed() || pipeline->parsed()) {
      auto cfg = parse_as<BatchConfig>(read_config(config_path), "batch config");
      if (seed) cfg.seed = *seed;
      if (gen_batch->parsed()) {
        parse_format(format);
        run_gen_batch({{"batch", cfg}, {"format", format}}, out);
      } else {
        const auto space = parse_as<SearchSpace>(read_config(grid_path), "search space");
        run_pipeline({{"batch", cfg}, {"grid", space}, {"per_campaign", per_campaign}}, out);
      }
    } else if (solve->parsed()) {
      run_solve({{"log", absolute(log_path)},
                 {"budget", budget},
                 {"cpc", cpc},
                 {"tol", tol ? json(*tol) : json(nullptr)}},
                out);
    } else if (simulate->parsed()) {
      const auto kind = parse_strategy(strategy);
      CampaignSpec spec{campaign_id, budget, cpc, step_seconds, num_steps};
      ControlConfig control;
      if (!tuned_path.empty() && !config_path.empty())
        throw UsageError("--tuned and --control are mutually exclusive");
      if (!tuned_path.empty()) {
        const auto tuned = parse_as<TunedConfig>(read_json_file(tuned_path), "tuned config");
        control = tuned.lookup(kind, campaign_id);
      } else if (!config_path.empty()) {
        control = parse_as<ControlConfig>(read_json_file(config_path), "control config");
      } else if (is_controlled(kind)) {
        throw UsageError("strategy " + strategy + " needs --tuned or --control");
      }
      if (alpha) control.weights.alpha = *alpha;
      if (beta) control.weights.beta = *beta;
      validate(control.weights);
      run_simulate({{"train", absolute(train_path)},
                    {"test", absolute(test_path)},
                    {"spec", spec},
                    {"strategy", strategy},
                    {"control", control}},
                   out);
    } else if (tune->parsed()) {
      const auto space = parse_as<SearchSpace>(read_config(grid_path), "search space");
      run_tune({{"batch", absolute(batch_dir)}, {"grid", space}, {"per_campaign", per_campaign}},
               out);
    } else if (evaluate->parsed()) {
      const auto tuned = parse_as<TunedConfig>(read_json_file(tuned_path), "tuned config");
      run_evaluate({{"batch", absolute(batch_dir)}, {"tuned", tuned}}, out);
    } else if (rerun->parsed()) {
      const json manifest = read_json_file(manifest_path);
      if (!manifest.contains("command") || !manifest.contains("params"))
        throw DataError(manifest_path + ": not a manifest");
      const fs::path target = out.empty() ? fs::path(manifest_path).parent_path() : fs::path(out);
      dispatch(manifest.at("command").get<std::string>(), manifest.at("params"), target);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
