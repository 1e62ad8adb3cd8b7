#include "lhv/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lhv/config.hpp"
#include "lhv/harness.hpp"
#include "lhv/loss.hpp"
#include "lhv/records.hpp"
#include "lhv/statespec.hpp"
#include "lhv/train.hpp"

namespace lhv {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitNumeric = 4;
constexpr int kExitValidation = 5;

// Every TrainConfig field gets a flag; unset flags keep the value from
// --config (or the default). Optionals distinguish "absent" from "default".
struct ConfigFlags {
  std::string config_path;
  std::optional<int64_t> steps;
  std::optional<int> batch;
  std::optional<double> lr;
  std::optional<int> degree;
  std::optional<uint64_t> n_hidden;
  std::optional<std::string> precision;
  std::optional<std::string> sampler;
  std::optional<std::vector<double>> plane_normal;
  std::optional<bool> diffusion;
  std::optional<double> diffusion_amplitude;
  std::optional<double> diffusion_fraction;
  std::optional<std::string> optimizer;
  std::optional<double> beta1;
  std::optional<double> beta2;
  std::optional<double> adam_eps;
  std::optional<uint64_t> seed;
  std::optional<int64_t> trace_stride;
  std::optional<double> lr_final_factor;
  std::optional<double> decay_start;
  std::optional<double> init_scale;
  std::optional<double> stop_below;
};

void add_config_flags(CLI::App* app, ConfigFlags& f) {
  app->add_option("--config", f.config_path, "JSON config file; flags below override its fields");
  app->add_option("--steps", f.steps, "optimization steps");
  app->add_option("--batch", f.batch, "measurement tuples per step");
  app->add_option("--lr", f.lr, "learning rate per hidden sample (applied rate is lr * n-hidden)");
  app->add_option("--degree", f.degree, "max odd spherical-harmonic degree of the response model");
  app->add_option("--n-hidden", f.n_hidden, "hidden-state samples in the cloud");
  app->add_option("--precision", f.precision, "f32 | f64")
      ->check(CLI::IsMember({"f32", "f64"}));
  app->add_option("--sampler", f.sampler, "direction sampler: full | planar")
      ->check(CLI::IsMember({"full", "planar"}));
  app->add_option("--plane-normal", f.plane_normal,
                  "planar sampler plane normal (three numbers)")
      ->expected(3);
  app->add_option("--diffusion", f.diffusion, "add decaying parameter noise (true/false)");
  app->add_option("--diffusion-amplitude", f.diffusion_amplitude,
                  "noise std as a multiple of the current lr");
  app->add_option("--diffusion-fraction", f.diffusion_fraction,
                  "leading fraction of steps that receive noise");
  app->add_option("--optimizer", f.optimizer, "adam | sgd")
      ->check(CLI::IsMember({"adam", "sgd"}));
  app->add_option("--beta1", f.beta1, "adam first-moment decay");
  app->add_option("--beta2", f.beta2, "adam second-moment decay");
  app->add_option("--adam-eps", f.adam_eps, "adam denominator epsilon");
  app->add_option("--seed", f.seed, "rng seed (streams for init, batches, noise derive from it)");
  app->add_option("--trace-stride", f.trace_stride, "record the loss every this many steps");
  app->add_option("--lr-final-factor", f.lr_final_factor,
                  "lr decays geometrically to lr * this by the last step (1 = constant)");
  app->add_option("--decay-start", f.decay_start,
                  "fraction of steps before the lr decay begins");
  app->add_option("--init-scale", f.init_scale,
                  "gaussian init std; <= 0 selects the default 1/sqrt(dim)");
  app->add_option("--stop-below", f.stop_below,
                  "early-stop once the smoothed loss stays below this (0 disables)");
}

TrainConfig resolve_config(const ConfigFlags& f) {
  TrainConfig cfg;
  if (!f.config_path.empty()) cfg = TrainConfig::load_file(f.config_path);
  if (f.steps) cfg.steps = *f.steps;
  if (f.batch) cfg.batch = *f.batch;
  if (f.lr) cfg.lr_per_sample = *f.lr;
  if (f.degree) cfg.degree = *f.degree;
  if (f.n_hidden) cfg.n_hidden = *f.n_hidden;
  if (f.precision) cfg.precision = precision_from_name(*f.precision);
  if (f.sampler) {
    cfg.sampler.kind = *f.sampler == "planar" ? SamplerKind::Planar : SamplerKind::FullSphere;
  }
  if (f.plane_normal) {
    cfg.sampler.normal = {(*f.plane_normal)[0], (*f.plane_normal)[1], (*f.plane_normal)[2]};
  }
  if (f.diffusion) cfg.diffusion.enabled = *f.diffusion;
  if (f.diffusion_amplitude) cfg.diffusion.amplitude = *f.diffusion_amplitude;
  if (f.diffusion_fraction) cfg.diffusion.active_fraction = *f.diffusion_fraction;
  if (f.optimizer) {
    cfg.optimizer.kind = *f.optimizer == "sgd" ? OptimizerKind::Sgd : OptimizerKind::Adam;
  }
  if (f.beta1) cfg.optimizer.beta1 = *f.beta1;
  if (f.beta2) cfg.optimizer.beta2 = *f.beta2;
  if (f.adam_eps) cfg.optimizer.eps = *f.adam_eps;
  if (f.seed) cfg.seed = *f.seed;
  if (f.trace_stride) cfg.trace_stride = *f.trace_stride;
  if (f.lr_final_factor) cfg.lr_final_factor = *f.lr_final_factor;
  if (f.decay_start) cfg.decay_start = *f.decay_start;
  if (f.init_scale) cfg.init_scale = *f.init_scale;
  if (f.stop_below) cfg.stop_below_loss = *f.stop_below;
  cfg.validate();
  return cfg;
}

struct SweepFlags {
  std::string records_path;
  std::string checkpoint_dir;
  double floor = 2e-8;
  double threshold = 10.0;
  double boundary = 3.0;
  int workers = 0;  // 0: take LHV_WORKERS or 1
};

void add_sweep_flags(CLI::App* app, SweepFlags& f) {
  app->add_option("--records", f.records_path, "JSONL records file (append; enables resume)");
  app->add_option("--checkpoint-dir", f.checkpoint_dir, "directory for trained cloud files");
  app->add_option("--floor", f.floor, "loss floor used for classification");
  app->add_option("--threshold", f.threshold, "non-local above threshold * floor");
  app->add_option("--boundary", f.boundary, "boundary band starts at this multiple of the floor");
  app->add_option("--workers", f.workers,
                  "concurrent trainings (default: LHV_WORKERS env var, else 1)");
}

SweepOptions resolve_sweep(const SweepFlags& f) {
  SweepOptions opts;
  opts.records_path = f.records_path;
  opts.checkpoint_dir = f.checkpoint_dir;
  opts.floor = f.floor;
  opts.threshold_factor = f.threshold;
  opts.boundary_factor = f.boundary;
  int workers = f.workers;
  if (workers <= 0) {
    workers = 1;
    if (const char* env = std::getenv("LHV_WORKERS")) {
      try {
        workers = std::max(1, std::stoi(env));
      } catch (const std::exception&) {
        throw std::invalid_argument("LHV_WORKERS is not an integer");
      }
    }
  }
  opts.workers = workers;
  return opts;
}

std::vector<double> parse_grid(const std::string& text) {
  // "lo:hi:n" inclusive linear grid, or a comma-separated list.
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double lo = 0.0, hi = 0.0;
    long n = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1) {
      throw std::invalid_argument("grid must be lo:hi:n or a comma list: " + text);
    }
    for (long i = 0; i < n; ++i) {
      out.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1));
    }
    return out;
  }
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  if (out.empty()) throw std::invalid_argument("empty grid: " + text);
  return out;
}

void print_records(const std::vector<SweepRecord>& recs) {
  for (const auto& r : recs) {
    const StateSpec spec = StateSpec::from_json(r.state_json);
    std::cout << spec.describe() << "  " << r.param_name << "=" << r.param_value
              << "  plateau=" << r.plateau << "  " << r.classification << "\n";
  }
}

int cmd_train(const ConfigFlags& cf, const SweepFlags& sf, const StateSpec& spec) {
  const TrainConfig cfg = resolve_config(cf);
  PointJob job;
  job.spec = spec;
  job.cfg = cfg;
  job.rho = spec.build();
  job.param_name = "v";
  job.param_value = spec.v;
  if (spec.kind == "xxz_two_spin") {
    job.param_name = "cx";
    job.param_value = spec.cx;
  } else if (spec.kind == "xxz_chain_subsystem") {
    job.param_name = "delta";
    job.param_value = spec.delta;
  }
  const SweepOptions opts = resolve_sweep(sf);
  const auto recs = run_jobs({job}, opts);
  print_records(recs);
  if (!recs.empty() && !recs[0].checkpoint.empty()) {
    std::cout << "checkpoint: " << recs[0].checkpoint << "\n";
  }
  return kExitOk;
}

int cmd_sweep(const ConfigFlags& cf, const SweepFlags& sf, const std::string& family,
              const std::string& grid_text, const std::vector<int>& degrees) {
  const TrainConfig cfg = resolve_config(cf);
  const SweepOptions opts = resolve_sweep(sf);
  const std::vector<double> grid = parse_grid(grid_text);
  std::vector<SweepRecord> recs;
  if (family == "werner") {
    recs = sweep_werner(grid, degrees.empty() ? std::vector<int>{cfg.degree} : degrees, cfg, opts);
  } else if (family == "planar") {
    recs = sweep_planar_werner(grid, cfg, opts);
  } else if (family == "ghz-w") {
    recs = sweep_ghz_w(grid, cfg, opts);
  } else {
    throw std::invalid_argument("unknown family: " + family);
  }
  print_records(recs);
  return kExitOk;
}

int cmd_xxz(const ConfigFlags& cf, const SweepFlags& sf, const std::string& mode, int nx, int nz,
            int walk_points, const std::string& deltas_text, const std::vector<int>& sub_sizes,
            int length, bool open_chain) {
  const TrainConfig cfg = resolve_config(cf);
  const SweepOptions opts = resolve_sweep(sf);
  std::vector<SweepRecord> recs;
  if (mode == "plane") {
    std::vector<XxzPlanePoint> pts;
    recs = scan_xxz_plane(nx, nz, cfg, opts, &pts);
    int physical = 0;
    for (const auto& p : pts) physical += p.physical ? 1 : 0;
    std::cout << "grid " << nx << "x" << nz << ": " << physical << " physical points\n";
  } else if (mode == "chsh-walk") {
    recs = scan_xxz_chsh_walk(walk_points, cfg, opts);
  } else if (mode == "physical-walk") {
    recs = scan_xxz_physical_walk(parse_grid(deltas_text), length, cfg, opts);
  } else if (mode == "chain") {
    recs = sweep_xxz_chain(parse_grid(deltas_text), sub_sizes, length, !open_chain, cfg, opts);
  } else {
    throw std::invalid_argument("unknown mode: " + mode);
  }
  print_records(recs);
  return kExitOk;
}

int cmd_marginals(const std::string& records_path, int eval_batch, uint64_t seed) {
  const auto recs = load_records(records_path, /*lenient=*/true);
  const auto margs = evaluate_marginals(recs, eval_batch, seed);
  if (margs.empty()) {
    std::cout << "no chain records with checkpoints in " << records_path << "\n";
    return kExitOk;
  }
  for (const auto& m : margs) {
    std::cout << "delta=" << m.delta << "  N=" << m.sub_size
              << "  train_plateau=" << m.train_plateau << "  pair_marginal=" << m.marginal_loss
              << "\n";
  }
  return kExitOk;
}

int cmd_floor(const ConfigFlags& cf, const std::string& out_path) {
  const TrainConfig cfg = resolve_config(cf);
  const FloorEstimate est = calibrate_floor(cfg);
  if (!out_path.empty()) {
    est.save(out_path);
    std::cout << "wrote " << out_path << "\n";
  }
  std::cout << est.to_json() << "\n";
  return kExitOk;
}

int cmd_validate(uint64_t seed) {
  const ValidationReport report = validate_suite(seed);
  for (const auto& [name, ok] : report.checks) {
    std::cout << (ok ? "ok   " : "FAIL ") << name << "\n";
  }
  for (const auto& f : report.failures) std::cout << "  " << f << "\n";
  std::cout << (report.all_ok() ? "all checks passed" : "validation failed") << "\n";
  return report.all_ok() ? kExitOk : kExitValidation;
}

int cmd_inspect(const std::string& path) {
  const HiddenStateCloud c = load_cloud(path);
  std::cout << "precision: " << precision_name(c.precision) << "\n"
            << "degree:    " << c.degree << "\n"
            << "spins:     " << c.spins << "\n"
            << "dim:       " << c.dim << "\n"
            << "samples:   " << c.samples << "\n";
  double lo = 0.0, hi = 0.0, sum = 0.0;
  bool first = true;
  for (uint64_t s = 0; s < c.samples; ++s) {
    for (int j = 0; j < c.spins; ++j) {
      double norm2 = 0.0;
      for (int k = 0; k < c.dim; ++k) {
        const double v = c.value(s, j, k);
        norm2 += v * v;
      }
      const double norm = std::sqrt(norm2);
      if (first || norm < lo) lo = norm;
      if (first || norm > hi) hi = norm;
      first = false;
      sum += norm;
    }
  }
  const double denom = static_cast<double>(c.samples) * std::max(1, c.spins);
  std::cout << "weight-vector norm: min " << lo << ", mean " << (denom > 0 ? sum / denom : 0.0)
            << ", max " << hi << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"local hidden-variable model trainer for few-qubit measurement statistics"};
  app.require_subcommand(1);

  ConfigFlags cf_train, cf_sweep, cf_xxz, cf_floor;
  SweepFlags sf_train, sf_sweep, sf_xxz;

  // train
  auto* train_cmd = app.add_subcommand("train", "optimize one state and report its plateau loss");
  StateSpec spec;
  std::vector<std::string> bloch_rows;
  train_cmd->add_option("--state", spec.kind,
                        "product | werner | ghz | w | xxz_two_spin | xxz_chain_subsystem")
      ->required();
  train_cmd->add_option("--v", spec.v, "visibility (werner/ghz/w)");
  train_cmd->add_option("--spins", spec.spins, "ghz qubit count");
  train_cmd->add_option("--bloch", bloch_rows,
                        "product-state Bloch vector \"x,y,z\", repeat once per spin");
  train_cmd->add_option("--cx", spec.cx, "transverse two-spin correlator");
  train_cmd->add_option("--cz", spec.cz, "longitudinal two-spin correlator");
  train_cmd->add_option("--delta", spec.delta, "chain anisotropy");
  train_cmd->add_option("--length", spec.length, "chain length");
  train_cmd->add_option("--periodic", spec.periodic, "periodic chain (true/false)");
  train_cmd->add_option("--sub-start", spec.sub_start, "first site of the trained subsystem");
  train_cmd->add_option("--sub-size", spec.sub_size, "number of contiguous subsystem sites");
  add_config_flags(train_cmd, cf_train);
  add_sweep_flags(train_cmd, sf_train);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "train a family over a parameter grid");
  std::string family = "werner", grid_text = "0.1:0.9:9";
  std::vector<int> degrees;
  sweep_cmd->add_option("--family", family, "werner | planar | ghz-w")->required();
  sweep_cmd->add_option("--grid", grid_text, "visibilities: lo:hi:n or comma list");
  sweep_cmd->add_option("--degrees", degrees, "model degrees (werner family only)")
      ->delimiter(',');
  add_config_flags(sweep_cmd, cf_sweep);
  add_sweep_flags(sweep_cmd, sf_sweep);

  // xxz
  auto* xxz_cmd = app.add_subcommand("xxz", "correlator-plane scans and chain ground states");
  std::string mode = "plane", deltas_text = "-0.5,0,0.5,1,1.5,2";
  int nx = 21, nz = 21, walk_points = 16, length = 12;
  std::vector<int> sub_sizes = {2};
  bool open_chain = false;
  xxz_cmd->add_option("--mode", mode, "plane | chsh-walk | physical-walk | chain")->required();
  xxz_cmd->add_option("--nx", nx, "plane grid columns");
  xxz_cmd->add_option("--nz", nz, "plane grid rows");
  xxz_cmd->add_option("--points", walk_points, "walk sample count");
  xxz_cmd->add_option("--deltas", deltas_text, "anisotropies: lo:hi:n or comma list");
  xxz_cmd->add_option("--sub-sizes", sub_sizes, "subsystem sizes (chain mode)")->delimiter(',');
  xxz_cmd->add_option("--length", length, "chain length");
  xxz_cmd->add_flag("--open", open_chain, "open boundary conditions");
  add_config_flags(xxz_cmd, cf_xxz);
  add_sweep_flags(xxz_cmd, sf_xxz);

  // marginals
  auto* marg_cmd =
      app.add_subcommand("marginals", "compare pair marginals of trained chain models");
  std::string marg_records;
  int eval_batch = 4096;
  uint64_t marg_seed = 1;
  marg_cmd->add_option("--records", marg_records, "records file from an xxz chain sweep")
      ->required();
  marg_cmd->add_option("--eval-batch", eval_batch, "direction tuples for the comparison");
  marg_cmd->add_option("--seed", marg_seed, "rng seed for the evaluation directions");

  // floor
  auto* floor_cmd =
      app.add_subcommand("floor", "calibrate the plateau floor on a panel of local states");
  std::string floor_out;
  floor_cmd->add_option("--out", floor_out, "write the estimate to this JSON file");
  add_config_flags(floor_cmd, cf_floor);

  // validate
  auto* val_cmd = app.add_subcommand("validate", "run the self-check suite");
  uint64_t val_seed = 1;
  val_cmd->add_option("--seed", val_seed, "rng seed for the checks");

  // inspect
  auto* inspect_cmd = app.add_subcommand("inspect", "print checkpoint metadata");
  std::string inspect_path;
  inspect_cmd->add_option("path", inspect_path, "cloud checkpoint file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(train_cmd)) {
      for (const auto& row : bloch_rows) {
        const std::vector<double> xyz = parse_grid(row);
        if (xyz.size() != 3) throw std::invalid_argument("--bloch needs three components: " + row);
        spec.blochs.push_back(Vec3{xyz[0], xyz[1], xyz[2]});
      }
      return cmd_train(cf_train, sf_train, spec);
    }
    if (app.got_subcommand(sweep_cmd)) {
      return cmd_sweep(cf_sweep, sf_sweep, family, grid_text, degrees);
    }
    if (app.got_subcommand(xxz_cmd)) {
      return cmd_xxz(cf_xxz, sf_xxz, mode, nx, nz, walk_points, deltas_text, sub_sizes, length,
                     open_chain);
    }
    if (app.got_subcommand(marg_cmd)) return cmd_marginals(marg_records, eval_batch, marg_seed);
    if (app.got_subcommand(floor_cmd)) return cmd_floor(cf_floor, floor_out);
    if (app.got_subcommand(val_cmd)) return cmd_validate(val_seed);
    if (app.got_subcommand(inspect_cmd)) return cmd_inspect(inspect_path);
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitUsage;
}

}  // namespace lhv
