#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "lhv/cli.hpp"
#include "lhv/records.hpp"

using namespace lhv;

namespace {

namespace fs = std::filesystem;

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"lhv"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / ("lhv_cli_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const std::vector<std::string> kTinyBudget = {"--steps", "40",     "--batch",  "16",
                                              "--n-hidden", "64",  "--degree", "1",
                                              "--trace-stride", "10"};

std::vector<std::string> with_budget(std::vector<std::string> args) {
  args.insert(args.end(), kTinyBudget.begin(), kTinyBudget.end());
  return args;
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  CHECK(run({}) == 2);
  CHECK(run({"frobnicate"}) == 2);
  CHECK(run({"train"}) == 2);              // --state is required
  CHECK(run({"sweep", "--family"}) == 2);  // missing value
  CHECK(run({"--help"}) == 0);
}

TEST_CASE("config errors exit with code 3") {
  CHECK(run(with_budget({"train", "--state", "bogus", "--v", "0.3"})) == 3);
  CHECK(run(with_budget({"train", "--state", "werner", "--v", "1.7"})) == 3);
  CHECK(run({"train", "--state", "werner", "--v", "0.3", "--steps", "0"}) == 3);
  TempDir dir("cfg");
  const std::string bad = (dir.path / "bad.json").string();
  std::ofstream(bad) << "{\"stepz\": 10}";
  CHECK(run({"train", "--state", "werner", "--v", "0.3", "--config", bad}) == 3);
  CHECK(run({"train", "--state", "werner", "--config", (dir.path / "absent.json").string()}) == 3);
}

TEST_CASE("training run writes a record and a loadable checkpoint") {
  TempDir dir("train");
  const std::string rec = (dir.path / "rec.jsonl").string();
  const std::string ckpt = (dir.path / "ckpt").string();
  const int rc = run(with_budget({"train", "--state", "werner", "--v", "0.35", "--seed", "5",
                                  "--records", rec, "--checkpoint-dir", ckpt}));
  CHECK(rc == 0);
  const auto recs = load_records(rec);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].param_value == 0.35);
  CHECK(recs[0].seed == 5);
  REQUIRE_FALSE(recs[0].checkpoint.empty());
  CHECK(fs::exists(recs[0].checkpoint));

  CHECK(run({"inspect", recs[0].checkpoint}) == 0);
  CHECK(run({"inspect", (dir.path / "missing.lhvc").string()}) == 3);

  // Rerunning the identical invocation resumes instead of retraining.
  CHECK(run(with_budget({"train", "--state", "werner", "--v", "0.35", "--seed", "5", "--records",
                         rec, "--checkpoint-dir", ckpt})) == 0);
  CHECK(load_records(rec).size() == 1);
}

TEST_CASE("identical invocations produce identical records up to wall time") {
  TempDir dir("det");
  const std::string rec_a = (dir.path / "a.jsonl").string();
  const std::string rec_b = (dir.path / "b.jsonl").string();
  const std::vector<std::string> base = with_budget(
      {"train", "--state", "ghz", "--spins", "2", "--v", "0.25", "--seed", "11"});
  auto with_records = [&](const std::string& r) {
    auto args = base;
    args.push_back("--records");
    args.push_back(r);
    return args;
  };
  REQUIRE(run(with_records(rec_a)) == 0);
  REQUIRE(run(with_records(rec_b)) == 0);
  auto a = load_records(rec_a);
  auto b = load_records(rec_b);
  REQUIRE(a.size() == 1);
  REQUIRE(b.size() == 1);
  a[0].wall_seconds = b[0].wall_seconds = 0.0;
  CHECK(a[0].to_line() == b[0].to_line());
}

TEST_CASE("sweep subcommand covers a grid with resume") {
  TempDir dir("sweep");
  const std::string rec = (dir.path / "rec.jsonl").string();
  const int rc = run(with_budget(
      {"sweep", "--family", "werner", "--grid", "0.1:0.3:3", "--records", rec}));
  CHECK(rc == 0);
  CHECK(load_records(rec).size() == 3);
  // Unknown family is a config error.
  CHECK(run(with_budget({"sweep", "--family", "nope", "--grid", "0.1:0.3:3"})) == 3);
  // Malformed grids are config errors.
  CHECK(run(with_budget({"sweep", "--family", "werner", "--grid", "0.5:0.1:-2"})) == 3);
}

TEST_CASE("validate subcommand reports success") {
  CHECK(run({"validate", "--seed", "1"}) == 0);
}

TEST_CASE("floor subcommand writes an estimate file") {
  TempDir dir("floor");
  const std::string out = (dir.path / "floor.json").string();
  const int rc = run(with_budget({"floor", "--out", out}));
  CHECK(rc == 0);
  std::ifstream in(out);
  nlohmann::json j;
  in >> j;
  CHECK(j.at("floor").get<double>() > 0.0);
  CHECK(j.at("panel").size() == 6);
}
