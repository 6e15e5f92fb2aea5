#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "mvbid/bid_log.hpp"
#include "mvbid/json_io.hpp"

using namespace mvbid;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "mvbid_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(MVBID_CLI) + " " + args + " > " +
                          (kRoot / "stdout.txt").string() + " 2> " + (kRoot / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string path(const std::string& rel) { return (kRoot / rel).string(); }

void write_text(const std::string& rel, const std::string& text) {
  std::ofstream(kRoot / rel, std::ios::binary) << text;
}

struct Workspace {
  Workspace() {
    fs::remove_all(kRoot);
    fs::create_directories(kRoot);
    SyntheticConfig day = make_batch_recipes(fixtures::small_batch(1, 3000))[0].day;
    day.drift.wp_factor = 1.2;
    write_json_file(kRoot / "day.json", day);
    write_json_file(kRoot / "batch.json", {{"n_campaigns", 2}, {"n_min", 3000}, {"n_max", 3000}});
    write_json_file(kRoot / "grid.json", {{"kp", {0.0, 0.1}}, {"ki", {0.0, 0.3}}, {"kd", {0.0}},
                                          {"alpha", {0.5, 1.0}}, {"beta", {1.0}}});
    write_text("two.csv", "id,timestamp,wp,ctr,cvr\n1,0,1,0.5,0.2\n2,10,2,0.1,0.1\n");
    write_text("slack.csv", "id,timestamp,wp,ctr,cvr\n1,0,1,0.5,0.2\n2,5,0.5,0.2,0.4\n");
  }
  ~Workspace() { fs::remove_all(kRoot); }
};

}  // namespace

TEST_CASE("command line interface") {
  Workspace ws;

  SUBCASE("gen is deterministic and drift changes the test day") {
    REQUIRE(run("gen --config " + path("day.json") + " --seed 7 --out " + path("g1")) == 0);
    REQUIRE(run("gen --config " + path("day.json") + " --seed 7 --out " + path("g2")) == 0);
    CHECK(slurp(kRoot / "g1/train.csv") == slurp(kRoot / "g2/train.csv"));
    CHECK(slurp(kRoot / "g1/test.csv") == slurp(kRoot / "g2/test.csv"));
    const auto train = summarize_log(load_log(kRoot / "g1/train.csv"));
    const auto test = summarize_log(load_log(kRoot / "g1/test.csv"));
    CHECK(test.mean_wp > 1.1 * train.mean_wp);
    REQUIRE(run("gen --config " + path("day.json") + " --seed 7 --format jsonl --out " + path("g3")) == 0);
    CHECK(load_log(kRoot / "g3/train.jsonl") == load_log(kRoot / "g1/train.csv"));
  }

  SUBCASE("usage and data errors map to exit codes") {
    CHECK(run("gen --out " + path("x")) == 1);
    CHECK(run("") == 1);
    CHECK(run("--help") == 0);
    CHECK(run("gen --config " + path("day.json") + " --format xml --out " + path("x")) == 1);
    CHECK(run("gen --config " + path("missing.json") + " --out " + path("x")) == 2);
    CHECK(run("solve --log " + path("missing.csv") + " --budget 1 --cpc 4 --out " + path("x")) == 2);
    CHECK(run("solve --log " + path("two.csv") + " --budget -1 --cpc 4 --out " + path("x")) == 2);
    CHECK(run("simulate --train " + path("two.csv") + " --test " + path("two.csv") +
              " --budget 1 --cpc 4 --strategy bogus --out " + path("x")) == 1);
    CHECK(run("simulate --train " + path("two.csv") + " --test " + path("two.csv") +
              " --budget 1 --cpc 4 --strategy i-pid --out " + path("x")) == 1);
  }

  SUBCASE("solve") {
    REQUIRE(run("solve --log " + path("two.csv") + " --budget 1 --cpc 4 --out " + path("s1")) == 0);
    const auto sol = read_json_file(kRoot / "s1/solution.json");
    CHECK(sol.at("dual_objective").get<double>() == doctest::Approx(0.1).epsilon(1e-9));

    REQUIRE(run("solve --log " + path("slack.csv") + " --budget 10 --cpc 10 --out " + path("s2")) == 0);
    CHECK(slurp(kRoot / "stdout.txt").rfind("p=0 q=0 ", 0) == 0);

    REQUIRE(run("solve --log " + path("two.csv") + " --budget 1 --cpc 4 --tol 1e-10 --out " + path("s3")) == 0);
    REQUIRE(run("solve --log " + path("two.csv") + " --budget 1 --cpc 4 --tol 5e-11 --out " + path("s4")) == 0);
    const double a = read_json_file(kRoot / "s3/solution.json").at("dual_objective").get<double>();
    const double b = read_json_file(kRoot / "s4/solution.json").at("dual_objective").get<double>();
    CHECK(std::abs(a - b) <= 1e-8);
  }

  SUBCASE("gen-batch, tune, evaluate, simulate and rerun") {
    REQUIRE(run("gen-batch --config " + path("batch.json") + " --out " + path("b")) == 0);
    REQUIRE(run("tune --batch " + path("b") + " --grid " + path("grid.json") + " --out " + path("t")) == 0);
    REQUIRE(run("evaluate --batch " + path("b") + " --tuned " + path("t/tuned.json") + " --out " + path("e")) == 0);

    std::istringstream csv(slurp(kRoot / "e/report.csv"));
    std::string line;
    int rows = -1;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 6);

    const std::string sim = "simulate --train " + path("b/c0/train.csv") + " --test " +
                            path("b/c0/test.csv") + " --budget 500 --cpc 200 --campaign-id c0 --tuned " +
                            path("t/tuned.json");
    REQUIRE(run(sim + " --strategy i-pid --out " + path("si")) == 0);
    REQUIRE(run(sim + " --strategy m-pid --alpha 1 --beta 1 --out " + path("sm")) == 0);
    const auto trace = slurp(kRoot / "si/trace.jsonl");
    CHECK(std::count(trace.begin(), trace.end(), '\n') == 24);
    CHECK(trace == slurp(kRoot / "sm/trace.jsonl"));

    for (const char* dir : {"b", "t", "e", "si"}) {
      const auto src = kRoot / dir;
      const auto dst = kRoot / (std::string(dir) + "_rerun");
      REQUIRE(run("rerun " + (src / "manifest.json").string() + " --out " + dst.string()) == 0);
      const auto manifest = read_json_file(src / "manifest.json");
      for (const auto& out : manifest.at("outputs"))
        CHECK(slurp(src / out.get<std::string>()) == slurp(dst / out.get<std::string>()));
      CHECK(slurp(src / "manifest.json") == slurp(dst / "manifest.json"));
    }
  }
}
