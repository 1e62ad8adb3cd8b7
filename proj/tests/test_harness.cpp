#include <doctest.h>

#include <filesystem>
#include <string>
#include <vector>

#include "lhv/harness.hpp"
#include "lhv/records.hpp"
#include "lhv/statespec.hpp"

using namespace lhv;

namespace {

namespace fs = std::filesystem;

TrainConfig tiny_config() {
  TrainConfig cfg;
  cfg.steps = 60;
  cfg.batch = 16;
  cfg.n_hidden = 64;
  cfg.degree = 1;
  cfg.precision = Precision::F32;
  cfg.lr_per_sample = 2e-4;
  cfg.trace_stride = 10;
  cfg.seed = 3;
  return cfg;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("lhv_harness_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

PointJob werner_job(double v, const TrainConfig& cfg) {
  PointJob job;
  job.spec.kind = "werner";
  job.spec.v = v;
  job.cfg = cfg;
  job.rho = werner_state(v);
  job.param_name = "v";
  job.param_value = v;
  return job;
}

}  // namespace

TEST_CASE("floor estimates persist through json") {
  FloorEstimate est;
  est.precision = Precision::F32;
  est.floor = 2.3e-8;
  est.probe = 1.9e-8;
  est.panel = {2.1e-8, 2.3e-8, 2.7e-8};
  est.panel_states = {"a", "b", "c"};
  const FloorEstimate back = FloorEstimate::from_json(est.to_json());
  CHECK(back.precision == Precision::F32);
  CHECK(back.floor == est.floor);
  CHECK(back.panel == est.panel);
  CHECK(back.panel_states == est.panel_states);

  TempDir dir("floor");
  const std::string path = (dir.path / "floor.json").string();
  est.save(path);
  CHECK(FloorEstimate::load(path).floor == est.floor);
  CHECK_THROWS_AS(FloorEstimate::load((dir.path / "nope.json").string()), std::runtime_error);
  CHECK_THROWS_AS(FloorEstimate::from_json("{}"), std::invalid_argument);
}

TEST_CASE("job runner writes records and checkpoints, then resumes") {
  TempDir dir("jobs");
  SweepOptions opts;
  opts.records_path = (dir.path / "rec.jsonl").string();
  opts.checkpoint_dir = (dir.path / "ckpt").string();
  opts.floor = 1e-9;

  const TrainConfig cfg = tiny_config();
  std::vector<PointJob> jobs = {werner_job(0.1, cfg), werner_job(0.3, cfg)};
  const auto first = run_jobs(jobs, opts);
  REQUIRE(first.size() == 2);
  CHECK(load_records(opts.records_path).size() == 2);
  for (const auto& r : first) {
    CHECK(r.plateau > 0.0);
    CHECK_FALSE(r.checkpoint.empty());
    CHECK(fs::exists(r.checkpoint));
    const HiddenStateCloud c = load_cloud(r.checkpoint);
    CHECK(c.samples == cfg.n_hidden);
    CHECK(r.classification == classify_plateau(r.plateau, opts.floor, opts.threshold_factor,
                                               opts.boundary_factor));
  }

  // A second call with one extra job trains only the new point.
  jobs.push_back(werner_job(0.5, cfg));
  const auto second = run_jobs(jobs, opts);
  REQUIRE(second.size() == 3);
  CHECK(second[0].plateau == first[0].plateau);
  CHECK(second[0].wall_seconds == first[0].wall_seconds);  // reloaded, not rerun
  CHECK(load_records(opts.records_path).size() == 3);

  // A changed config identity is a different point.
  TrainConfig reseeded = cfg;
  reseeded.seed = 99;
  const auto third = run_jobs({werner_job(0.1, reseeded)}, opts);
  CHECK(load_records(opts.records_path).size() == 4);
  CHECK(third[0].seed == 99);
}

TEST_CASE("sweep drivers stamp family context into notes") {
  TempDir dir("fam");
  SweepOptions opts;  // in-memory only
  const TrainConfig cfg = tiny_config();

  const auto wr = sweep_werner({0.2}, {1}, cfg, opts);
  REQUIRE(wr.size() == 1);
  CHECK(wr[0].note.find("degree") != std::string::npos);
  CHECK(StateSpec::from_json(wr[0].state_json).kind == "werner");

  const auto pl = sweep_planar_werner({0.2}, cfg, opts);
  REQUIRE(pl.size() == 1);
  const TrainConfig pl_cfg = TrainConfig::from_json(pl[0].config_json);
  CHECK(pl_cfg.sampler.kind == SamplerKind::Planar);

  const auto gw = sweep_ghz_w({0.2}, cfg, opts);
  REQUIRE(gw.size() == 2);
  CHECK(StateSpec::from_json(gw[0].state_json).kind == "ghz");
  CHECK(StateSpec::from_json(gw[1].state_json).kind == "w");
}

TEST_CASE("xxz plane scan trains only the physical diamond") {
  SweepOptions opts;
  TrainConfig cfg = tiny_config();
  cfg.steps = 30;
  std::vector<XxzPlanePoint> pts;
  const auto recs = scan_xxz_plane(5, 5, cfg, opts, &pts);
  REQUIRE(pts.size() == 25);
  size_t physical = 0;
  for (const auto& p : pts) physical += p.physical ? 1 : 0;
  CHECK(recs.size() == physical);
  CHECK(physical > 0);
  CHECK(physical < 25);

  // Werner diagonal points are flagged; the (0.5, 0.5) corner is unphysical.
  bool diag_seen = false;
  for (const auto& p : pts) {
    if (p.on_werner_diagonal) diag_seen = true;
    if (p.cx > 0.4 && p.cz > 0.4) CHECK_FALSE(p.physical);
    if (p.physical && p.chsh_m > 1.0) CHECK(p.ppt_entangled);
  }
  CHECK(diag_seen);
}

TEST_CASE("xxz walks parameterize by arc length") {
  SweepOptions opts;
  TrainConfig cfg = tiny_config();
  cfg.steps = 30;
  const auto walk = scan_xxz_chsh_walk(4, cfg, opts);
  REQUIRE(walk.size() == 4);
  CHECK(walk[0].param_value == 0.0);
  CHECK(walk[3].param_value == 1.0);
  for (size_t i = 1; i < walk.size(); ++i) {
    CHECK(walk[i].param_value > walk[i - 1].param_value);
  }
  for (const auto& r : walk) {
    const StateSpec spec = StateSpec::from_json(r.state_json);
    CHECK(spec.kind == "xxz_two_spin");
    // Every walk point is on the strong-correlation side.
    CHECK(chsh_horodecki(spec.build()) > 0.99);
  }

  const auto phys = scan_xxz_physical_walk({0.0, 1.0, 2.0}, 4, cfg, opts);
  REQUIRE(phys.size() == 3);
  CHECK(phys[0].param_value == 0.0);
  CHECK(phys[2].param_value == 1.0);
  for (const auto& r : phys) {
    CHECK(StateSpec::from_json(r.state_json).kind == "xxz_two_spin");
    CHECK(r.note.find("delta") != std::string::npos);
  }
}

TEST_CASE("chain sweep reduces ground states and marginals evaluate") {
  TempDir dir("chain");
  SweepOptions opts;
  opts.records_path = (dir.path / "rec.jsonl").string();
  opts.checkpoint_dir = (dir.path / "ckpt").string();
  TrainConfig cfg = tiny_config();
  cfg.steps = 40;

  const auto recs = sweep_xxz_chain({1.0}, {2}, 4, true, cfg, opts);
  REQUIRE(recs.size() == 1);
  const StateSpec spec = StateSpec::from_json(recs[0].state_json);
  CHECK(spec.kind == "xxz_chain_subsystem");
  CHECK(spec.sub_size == 2);
  CHECK(spec.length == 4);
  CHECK(recs[0].param_value == 1.0);

  const auto margs = evaluate_marginals(recs, 64, 5);
  REQUIRE(margs.size() == 1);
  CHECK(margs[0].sub_size == 2);
  CHECK(margs[0].delta == 1.0);
  CHECK(margs[0].marginal_loss >= 0.0);
  CHECK(std::isfinite(margs[0].marginal_loss));

  // Records without checkpoints are skipped.
  auto naked = recs;
  naked[0].checkpoint.clear();
  CHECK(evaluate_marginals(naked, 16, 5).empty());
}

TEST_CASE("floor calibration aggregates a panel") {
  TrainConfig cfg = tiny_config();
  cfg.steps = 30;
  const FloorEstimate est = calibrate_floor(cfg);
  CHECK(est.panel.size() == 6);
  CHECK(est.panel_states.size() == 6);
  CHECK(est.floor > 0.0);
  CHECK(est.probe > 0.0);
  // The floor is the median of the panel, so it lies inside its range.
  double lo = est.panel[0], hi = est.panel[0];
  for (const double p : est.panel) {
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  CHECK(est.floor >= lo);
  CHECK(est.floor <= hi);
}
