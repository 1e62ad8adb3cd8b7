#include "lhv/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <json.hpp>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lhv/eval.hpp"
#include "lhv/loss.hpp"
#include "lhv/reference.hpp"
#include "lhv/rng.hpp"
#include "lhv/sampler.hpp"
#include "lhv/stats.hpp"
#include "lhv/xxz.hpp"

namespace lhv {

namespace fs = std::filesystem;

std::string FloorEstimate::to_json() const {
  nlohmann::json j;
  j["precision"] = precision_name(precision);
  j["floor"] = floor;
  j["probe"] = probe;
  j["panel"] = panel;
  j["panel_states"] = panel_states;
  return j.dump(2);
}

FloorEstimate FloorEstimate::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("floor estimate: bad JSON: ") + e.what());
  }
  FloorEstimate f;
  try {
    f.precision = precision_from_name(j.at("precision").get<std::string>());
    f.floor = j.at("floor").get<double>();
    f.probe = j.at("probe").get<double>();
    f.panel = j.at("panel").get<std::vector<double>>();
    f.panel_states = j.at("panel_states").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("floor estimate: bad field: ") + e.what());
  }
  return f;
}

void FloorEstimate::save(const std::string& path) const {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("floor estimate: cannot open " + path);
  out << to_json() << "\n";
}

FloorEstimate FloorEstimate::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("floor estimate: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

FloorEstimate calibrate_floor(const TrainConfig& cfg) {
  cfg.validate();
  const CounterRng rng(cfg.seed, RngStream::Generic);
  auto random_bloch = [&](uint64_t k) {
    const auto dir = rng.sphere(1000, k);
    const double mag = rng.uniform(1001, k);
    return Vec3{mag * dir[0], mag * dir[1], mag * dir[2]};
  };

  struct PanelEntry {
    std::string label;
    DensityMatrix rho;
  };
  std::vector<PanelEntry> panel;
  panel.push_back({"product |up>", product_state({Vec3{0.0, 0.0, 1.0}})});
  panel.push_back({"product N=1 random", product_state({random_bloch(0)})});
  panel.push_back({"product N=2 random", product_state({random_bloch(1), random_bloch(2)})});
  panel.push_back(
      {"product N=3 random", product_state({random_bloch(3), random_bloch(4), random_bloch(5)})});
  panel.push_back({"ghz N=2 v=0.2", ghz_state(2, 0.2)});
  panel.push_back({"ghz N=3 v=0.2", ghz_state(3, 0.2)});

  FloorEstimate est;
  est.precision = cfg.precision;
  for (size_t i = 0; i < panel.size(); ++i) {
    TrainConfig c = cfg;
    c.seed = cfg.seed + 11 * (i + 1);
    const TrainResult r = train(panel[i].rho, c);
    est.panel.push_back(r.trace.plateau());
    est.panel_states.push_back(panel[i].label);
  }
  est.floor = median(est.panel);
  est.probe = scalar_probe(cfg.precision).plateau;
  return est;
}

namespace {

uint64_t job_key(const PointJob& job) {
  return sweep_key(job.spec.to_json(), job.param_name, job.cfg.hash());
}

SweepRecord make_record(const PointJob& job, const TrainResult& res, const SweepOptions& opts) {
  SweepRecord rec;
  rec.state_json = job.spec.to_json();
  rec.param_name = job.param_name;
  rec.param_value = job.param_value;
  rec.config_json = job.cfg.to_json();
  rec.config_hash = job.cfg.hash();
  rec.seed = job.cfg.seed;
  rec.plateau = res.trace.plateau();
  rec.floor = opts.floor;
  rec.threshold_factor = opts.threshold_factor;
  rec.classification =
      classify_plateau(rec.plateau, opts.floor, opts.threshold_factor, opts.boundary_factor);
  rec.wall_seconds = res.wall_seconds;
  const size_t n = res.trace.steps.size();
  const size_t stride = n > 240 ? (n + 239) / 240 : 1;
  for (size_t k = 0; k < n; k += stride) {
    rec.trace.emplace_back(res.trace.steps[k], res.trace.raw[k]);
  }
  if (n > 0 && (n - 1) % stride != 0) {
    rec.trace.emplace_back(res.trace.steps[n - 1], res.trace.raw[n - 1]);
  }
  rec.pass = job.pass;
  rec.note = job.note;
  return rec;
}

}  // namespace

std::vector<SweepRecord> run_jobs(const std::vector<PointJob>& jobs, const SweepOptions& opts) {
  std::unordered_map<uint64_t, SweepRecord> existing;
  if (!opts.records_path.empty() && fs::exists(opts.records_path)) {
    for (auto& r : load_records(opts.records_path, /*lenient=*/true)) {
      existing.emplace(r.resume_key(), std::move(r));
    }
  }
  std::optional<RecordWriter> writer;
  if (!opts.records_path.empty()) writer.emplace(opts.records_path);
  if (!opts.checkpoint_dir.empty()) fs::create_directories(opts.checkpoint_dir);

  std::vector<SweepRecord> out(jobs.size());
  std::vector<char> todo(jobs.size(), 1);
  for (size_t i = 0; i < jobs.size(); ++i) {
    const auto it = existing.find(job_key(jobs[i]));
    if (it != existing.end()) {
      out[i] = it->second;
      todo[i] = 0;
    }
  }

  std::atomic<size_t> cursor{0};
  std::atomic<bool> failed{false};
  std::mutex err_mu;
  std::string err;
  const int workers = std::max(1, opts.workers);

  auto body = [&]() {
#ifdef _OPENMP
    if (workers > 1) omp_set_num_threads(std::max(1, omp_get_max_threads() / workers));
#endif
    for (;;) {
      if (failed.load()) return;
      const size_t i = cursor.fetch_add(1);
      if (i >= jobs.size()) return;
      if (!todo[i]) continue;
      try {
        const TrainResult res = train(jobs[i].rho, jobs[i].cfg);
        SweepRecord rec = make_record(jobs[i], res, opts);
        if (!opts.checkpoint_dir.empty()) {
          std::ostringstream name;
          name << "cloud_" << std::hex << std::setw(16) << std::setfill('0') << job_key(jobs[i])
               << ".lhvc";
          const std::string path = (fs::path(opts.checkpoint_dir) / name.str()).string();
          save_cloud(res.cloud, path);
          rec.checkpoint = path;
        }
        if (writer) writer->append(rec);
        out[i] = std::move(rec);
      } catch (const std::exception& e) {
        {
          std::lock_guard<std::mutex> lock(err_mu);
          if (err.empty()) err = e.what();
        }
        failed.store(true);
        return;
      }
    }
  };

  if (workers == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) throw std::runtime_error("sweep job failed: " + err);
  return out;
}

std::vector<SweepRecord> sweep_werner(const std::vector<double>& grid,
                                      const std::vector<int>& degrees, TrainConfig base,
                                      const SweepOptions& opts) {
  std::vector<PointJob> jobs;
  for (const int d : degrees) {
    for (const double v : grid) {
      PointJob job;
      job.spec.kind = "werner";
      job.spec.v = v;
      job.cfg = base;
      job.cfg.degree = d;
      job.rho = werner_state(v);
      job.param_name = "v";
      job.param_value = v;
      nlohmann::json n;
      n["degree"] = d;
      job.note = n.dump();
      jobs.push_back(std::move(job));
    }
  }
  return run_jobs(jobs, opts);
}

std::vector<SweepRecord> sweep_planar_werner(const std::vector<double>& grid, TrainConfig base,
                                             const SweepOptions& opts) {
  base.sampler.kind = SamplerKind::Planar;
  std::vector<PointJob> jobs;
  for (const double v : grid) {
    PointJob job;
    job.spec.kind = "werner";
    job.spec.v = v;
    job.cfg = base;
    job.rho = werner_state(v);
    job.param_name = "v";
    job.param_value = v;
    nlohmann::json n;
    n["sampler"] = "planar";
    job.note = n.dump();
    jobs.push_back(std::move(job));
  }
  return run_jobs(jobs, opts);
}

std::vector<SweepRecord> sweep_ghz_w(const std::vector<double>& grid, TrainConfig base,
                                     const SweepOptions& opts) {
  std::vector<PointJob> jobs;
  for (const char* family : {"ghz", "w"}) {
    for (const double v : grid) {
      PointJob job;
      job.spec.kind = family;
      job.spec.v = v;
      job.spec.spins = 3;
      job.cfg = base;
      job.rho = std::string(family) == "ghz" ? ghz_state(3, v) : w_state(v);
      job.param_name = "v";
      job.param_value = v;
      nlohmann::json n;
      n["family"] = family;
      job.note = n.dump();
      jobs.push_back(std::move(job));
    }
  }
  return run_jobs(jobs, opts);
}

std::vector<SweepRecord> scan_xxz_plane(int nx, int nz, TrainConfig base, const SweepOptions& opts,
                                        std::vector<XxzPlanePoint>* points) {
  if (nx < 1 || nz < 1) throw std::invalid_argument("xxz plane: grid must be at least 1x1");
  std::vector<PointJob> jobs;
  std::vector<XxzPlanePoint> overlay;
  overlay.reserve(static_cast<size_t>(nx) * nz);
  for (int i = 0; i < nx; ++i) {
    const double cx = nx == 1 ? 0.0 : -1.0 + 2.0 * i / (nx - 1);
    for (int k = 0; k < nz; ++k) {
      const double cz = nz == 1 ? 0.0 : -1.0 + 2.0 * k / (nz - 1);
      XxzPlanePoint pt;
      pt.cx = cx;
      pt.cz = cz;
      pt.physical = std::abs(cz) <= 1.0 + 1e-12 && 2.0 * std::abs(cx) <= 1.0 - cz + 1e-12;
      if (pt.physical) {
        const DensityMatrix rho = xxz_symmetric_two_spin(cx, cz);
        const PptResult ppt = ppt_entangled(rho);
        pt.ppt_entangled = ppt.entangled;
        pt.min_pt_eigenvalue = ppt.min_eigenvalue;
        pt.chsh_m = chsh_horodecki(rho);
        pt.on_werner_diagonal = cx <= 0.0 && std::abs(cx - cz) < 1e-9;

        PointJob job;
        job.spec.kind = "xxz_two_spin";
        job.spec.cx = cx;
        job.spec.cz = cz;
        job.cfg = base;
        job.rho = rho;
        job.param_name = "cx";
        job.param_value = cx;
        nlohmann::json n;
        n["cx"] = cx;
        n["cz"] = cz;
        n["ppt_entangled"] = pt.ppt_entangled;
        n["min_pt_eigenvalue"] = pt.min_pt_eigenvalue;
        n["chsh_m"] = pt.chsh_m;
        n["werner_diagonal"] = pt.on_werner_diagonal;
        job.note = n.dump();
        jobs.push_back(std::move(job));
      }
      overlay.push_back(pt);
    }
  }
  if (points != nullptr) *points = overlay;
  return run_jobs(jobs, opts);
}

std::vector<SweepRecord> scan_xxz_chsh_walk(int n_points, TrainConfig base,
                                            const SweepOptions& opts) {
  if (n_points < 1) throw std::invalid_argument("chsh walk: need at least one point");
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const double stub_top = 1.0 - std::sqrt(2.0);   // diamond edge at cx = -1/sqrt(2)
  const double len_stub = stub_top + inv_sqrt2;   // vertical piece down to the circle
  const double len_arc = 0.25 * 3.14159265358979323846;  // quarter arc, 225 to 270 deg
  const double total = len_stub + len_arc;

  std::vector<PointJob> jobs;
  for (int k = 0; k < n_points; ++k) {
    const double s =
        n_points == 1 ? 0.5 * total : total * static_cast<double>(k) / (n_points - 1);
    double cx, cz;
    if (s <= len_stub) {
      cx = -inv_sqrt2;
      cz = stub_top - s;
    } else {
      const double theta = 1.25 * 3.14159265358979323846 + (s - len_stub);
      cx = std::cos(theta);
      cz = std::sin(theta);
    }
    PointJob job;
    job.spec.kind = "xxz_two_spin";
    job.spec.cx = cx;
    job.spec.cz = cz;
    job.cfg = base;
    job.rho = xxz_symmetric_two_spin(cx, cz);
    job.param_name = "arc";
    job.param_value = total > 0 ? s / total : 0.0;
    nlohmann::json n;
    n["curve"] = "chsh";
    n["cx"] = cx;
    n["cz"] = cz;
    n["werner_diagonal_distance"] = std::abs(cx - cz) / std::sqrt(2.0);
    job.note = n.dump();
    jobs.push_back(std::move(job));
  }
  return run_jobs(jobs, opts);
}

std::vector<SweepRecord> scan_xxz_physical_walk(const std::vector<double>& deltas,
                                                int chain_length, TrainConfig base,
                                                const SweepOptions& opts) {
  struct WalkPoint {
    double delta, cx, cz;
  };
  std::vector<WalkPoint> pts;
  pts.reserve(deltas.size());
  for (const double d : deltas) {
    SpinChainSpec spec;
    spec.length = chain_length;
    spec.delta = d;
    spec.periodic = true;
    const GroundState gs = ground_state(spec);
    const BondCorrelators bc = bond_correlators(gs.psi, chain_length, 0, 1);
    pts.push_back({d, bc.xx, bc.zz});
  }
  std::vector<double> arc(pts.size(), 0.0);
  for (size_t i = 1; i < pts.size(); ++i) {
    arc[i] = arc[i - 1] + std::hypot(pts[i].cx - pts[i - 1].cx, pts[i].cz - pts[i - 1].cz);
  }
  const double total = arc.empty() ? 0.0 : arc.back();

  std::vector<PointJob> jobs;
  for (size_t i = 0; i < pts.size(); ++i) {
    PointJob job;
    job.spec.kind = "xxz_two_spin";
    job.spec.cx = pts[i].cx;
    job.spec.cz = pts[i].cz;
    job.cfg = base;
    job.rho = xxz_symmetric_two_spin(pts[i].cx, pts[i].cz);
    job.param_name = "arc";
    job.param_value = total > 0 ? arc[i] / total : 0.0;
    nlohmann::json n;
    n["curve"] = "physical";
    n["delta"] = pts[i].delta;
    n["cx"] = pts[i].cx;
    n["cz"] = pts[i].cz;
    job.note = n.dump();
    jobs.push_back(std::move(job));
  }
  return run_jobs(jobs, opts);
}

std::vector<SweepRecord> sweep_xxz_chain(const std::vector<double>& deltas,
                                         const std::vector<int>& sub_sizes, int chain_length,
                                         bool periodic, TrainConfig base,
                                         const SweepOptions& opts) {
  std::vector<PointJob> jobs;
  for (const double d : deltas) {
    SpinChainSpec cs;
    cs.length = chain_length;
    cs.delta = d;
    cs.periodic = periodic;
    const GroundState gs = ground_state(cs);
    const Eigen::VectorXcd psi = gs.psi.cast<std::complex<double>>();
    for (const int n_sub : sub_sizes) {
      std::vector<int> keep(static_cast<size_t>(n_sub));
      std::iota(keep.begin(), keep.end(), 0);
      PointJob job;
      job.spec.kind = "xxz_chain_subsystem";
      job.spec.delta = d;
      job.spec.length = chain_length;
      job.spec.periodic = periodic;
      job.spec.sub_start = 0;
      job.spec.sub_size = n_sub;
      job.cfg = base;
      job.rho = partial_trace_vec(psi, chain_length, keep);
      job.param_name = "delta";
      job.param_value = d;
      nlohmann::json note;
      note["sub_size"] = n_sub;
      note["ground_energy"] = gs.energy;
      note["degenerate"] = gs.degenerate;
      job.note = note.dump();
      jobs.push_back(std::move(job));
    }
  }
  return run_jobs(jobs, opts);
}

std::vector<MarginalRecord> evaluate_marginals(const std::vector<SweepRecord>& chain_records,
                                               int eval_batch, uint64_t seed) {
  std::vector<MarginalRecord> out;
  for (const auto& rec : chain_records) {
    if (rec.checkpoint.empty()) continue;
    const StateSpec spec = StateSpec::from_json(rec.state_json);
    if (spec.kind != "xxz_chain_subsystem") continue;

    StateSpec pair = spec;
    pair.sub_size = 2;  // adjacent pair at the sub-chain start
    const DensityMatrix rho2 = pair.build();
    const HiddenStateCloud cloud = load_cloud(rec.checkpoint);
    const ShBasis basis(cloud.degree);
    const CorrelationTensor tensor(rho2);
    const CounterRng rng(seed, RngStream::Probe);

    const std::vector<int> sites = {0, 1};
    const std::vector<int> ups = {1, 1};
    std::vector<double> kls(static_cast<size_t>(eval_batch));
    for (int b = 0; b < eval_batch; ++b) {
      double dirs[6];
      for (int j = 0; j < 2; ++j) {
        const auto v = rng.sphere(static_cast<uint64_t>(b), static_cast<uint64_t>(j));
        dirs[3 * j + 0] = v[0];
        dirs[3 * j + 1] = v[1];
        dirs[3 * j + 2] = v[2];
      }
      const double pq = tensor.prob_all_up(dirs);
      const double pl = lhv_marginal_prob(cloud, basis, sites, dirs, ups);
      kls[static_cast<size_t>(b)] = kl_two_outcome<double>(pq, pl);
    }
    MarginalRecord m;
    m.state_json = rec.state_json;
    m.delta = spec.delta;
    m.sub_size = spec.sub_size;
    m.train_plateau = rec.plateau;
    m.marginal_loss = block_tree_sum(kls) / static_cast<double>(eval_batch);
    out.push_back(std::move(m));
  }
  return out;
}

namespace {

struct CheckRunner {
  ValidationReport report;
  void run(const std::string& name, const std::function<std::string()>& fn) {
    std::string detail;
    try {
      detail = fn();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    report.checks.emplace_back(name, detail.empty());
    if (!detail.empty()) report.failures.push_back(name + ": " + detail);
  }
};

std::string expect(bool ok, const std::string& msg) { return ok ? std::string() : msg; }

std::string check_scalar_kl() {
  const double got = kl_two_outcome<double>(0.3, 0.5);
  const double want = 0.0822828785;
  return expect(std::abs(got - want) < 1e-9,
                "kl(0.3,0.5) = " + std::to_string(got) + ", expected ~" + std::to_string(want));
}

std::string check_qm_normalization(uint64_t seed) {
  const CounterRng rng(seed, RngStream::Generic);
  for (int c = 0; c < 20; ++c) {
    const int n = 1 + c % 3;
    std::vector<Vec3> blochs;
    for (int j = 0; j < n; ++j) {
      const auto dir = rng.sphere(10 + c, static_cast<uint64_t>(j));
      const double mag = rng.uniform(40 + c, static_cast<uint64_t>(j));
      blochs.push_back(Vec3{mag * dir[0], mag * dir[1], mag * dir[2]});
    }
    const double v = rng.uniform(70 + c, 99);
    const DensityMatrix rho = noisy_state(product_state(blochs), v);
    std::vector<Vec3> dirs;
    for (int j = 0; j < n; ++j) {
      const auto d = rng.sphere(100 + c, static_cast<uint64_t>(j));
      dirs.push_back(Vec3{d[0], d[1], d[2]});
    }
    double total = 0.0;
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::vector<int> outcomes(static_cast<size_t>(n));
      for (int j = 0; j < n; ++j) outcomes[static_cast<size_t>(j)] = (mask >> j) & 1 ? 1 : -1;
      const double p = qm_prob(rho, dirs, outcomes);
      if (p < -1e-12 || p > 1.0 + 1e-12) return "qm_prob outside [0,1]";
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-10) {
      return "outcome distribution sums to " + std::to_string(total);
    }
  }
  return {};
}

std::string check_single_qubit_bound(uint64_t seed) {
  const CounterRng rng(seed, RngStream::Generic);
  for (int c = 0; c < 1000; ++c) {
    const auto rdir = rng.sphere(200 + c, 0);
    const double mag = rng.uniform(1200 + c, 0);
    const DensityMatrix rho =
        product_state({Vec3{mag * rdir[0], mag * rdir[1], mag * rdir[2]}});
    const auto a1 = rng.sphere(2200 + c, 0);
    const auto a2 = rng.sphere(2200 + c, 1);
    const Vec3 n1{a1[0], a1[1], a1[2]}, n2{a2[0], a2[1], a2[2]};
    const double cos_theta = n1[0] * n2[0] + n1[1] * n2[1] + n1[2] * n2[2];
    const double bound = 1.0 + std::sqrt(std::max(0.0, (1.0 + cos_theta) / 2.0)) + 1e-12;
    const double p = single_qubit_up_prob(rho, n1) + single_qubit_up_prob(rho, n2);
    if (p > bound) {
      return "p1+p2 = " + std::to_string(p) + " exceeds bound " + std::to_string(bound);
    }
  }
  return {};
}

std::string check_gradient_fd(uint64_t seed) {
  const CounterRng rng(seed, RngStream::Generic);
  for (int inst = 0; inst < 10; ++inst) {
    const int spins = 1 + inst % 3;
    const int degree = inst % 2 == 0 ? 1 : 3;
    const uint64_t n_h = 4 + static_cast<uint64_t>(inst % 2) * 4;
    const int batch = 2 + inst % 3;
    HiddenStateCloud cloud =
        init_cloud(degree, spins, n_h, Precision::F64, seed + 31 * inst, 0.7);
    const ShBasis basis(degree);

    std::vector<double> dirs(static_cast<size_t>(batch) * spins * 3);
    std::vector<double> pq(static_cast<size_t>(batch));
    for (int b = 0; b < batch; ++b) {
      for (int j = 0; j < spins; ++j) {
        const auto v = rng.sphere(5000 + 100 * inst + b, static_cast<uint64_t>(j));
        for (int k = 0; k < 3; ++k) dirs[(static_cast<size_t>(b) * spins + j) * 3 + k] = v[k];
      }
      pq[static_cast<size_t>(b)] = 0.05 + 0.9 * rng.uniform(6000 + 100 * inst, b);
    }

    const ref::StepResult base = ref::step(cloud, basis, dirs.data(), batch, pq.data());
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < cloud.f64.size(); ++i) {
      const double x = cloud.f64[i];
      const double h = 1e-5 * (1.0 + std::abs(x));
      cloud.f64[i] = x + h;
      const double lp = ref::step(cloud, basis, dirs.data(), batch, pq.data()).loss;
      cloud.f64[i] = x - h;
      const double lm = ref::step(cloud, basis, dirs.data(), batch, pq.data()).loss;
      cloud.f64[i] = x;
      const double fd = (lp - lm) / (2.0 * h);
      num += (fd - base.grad[i]) * (fd - base.grad[i]);
      den += base.grad[i] * base.grad[i];
    }
    const double rel = std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
    if (rel > 1e-4) {
      return "instance " + std::to_string(inst) + ": rel err " + std::to_string(rel);
    }
  }
  return {};
}

std::string check_separable_oracle(uint64_t seed) {
  const CounterRng rng(seed, RngStream::Generic);
  const uint64_t n_h = 1 << 16;
  const double tol = 4.0 / std::sqrt(static_cast<double>(n_h));
  const ShBasis basis(1);
  for (int c = 0; c < 8; ++c) {
    const int spins = 1 + c % 3;
    auto rand_blochs = [&](uint64_t tag) {
      std::vector<Eigen::Vector3d> bl;
      for (int j = 0; j < spins; ++j) {
        const auto d = rng.sphere(8000 + 100 * c + tag, static_cast<uint64_t>(j));
        const double mag = rng.uniform(9000 + 100 * c + tag, static_cast<uint64_t>(j));
        bl.emplace_back(mag * d[0], mag * d[1], mag * d[2]);
      }
      return bl;
    };
    BlochAssignment assign;
    std::vector<std::vector<Eigen::Vector3d>> comps;
    std::vector<double> weights;
    if (c % 2 == 0) {
      comps.push_back(rand_blochs(0));
      assign = product_assignment(comps[0]);
      weights = {1.0};
    } else {
      comps.push_back(rand_blochs(0));
      comps.push_back(rand_blochs(1));
      weights = {0.3 + 0.4 * rng.uniform(9900 + c, 0), 1.0};
      weights[1] = 1.0 - weights[0];
      assign = mixture_assignment(weights, comps, seed + 7 * c);
    }
    const HiddenStateCloud cloud = separable_cloud(spins, n_h, seed + 13 * c, 1e3, assign);

    DensityMatrix rho = [&] {
      std::vector<DensityMatrix> parts;
      Eigen::MatrixXcd acc;
      for (size_t k = 0; k < comps.size(); ++k) {
        std::vector<Vec3> bl;
        for (const auto& b : comps[k]) bl.push_back(Vec3{b.x(), b.y(), b.z()});
        const DensityMatrix r = product_state(bl);
        if (k == 0) {
          acc = weights[k] * r.m;
        } else {
          acc += weights[k] * r.m;
        }
      }
      return DensityMatrix::validated(acc);
    }();

    for (int t = 0; t < 25; ++t) {
      std::vector<Vec3> dirs;
      std::vector<double> flat;
      for (int j = 0; j < spins; ++j) {
        const auto d = rng.sphere(12000 + 100 * c + t, static_cast<uint64_t>(j));
        dirs.push_back(Vec3{d[0], d[1], d[2]});
        flat.insert(flat.end(), {d[0], d[1], d[2]});
      }
      const double want = qm_prob_all_up(rho, dirs);
      const double got = lhv_prob_all_up(cloud, basis, flat.data(), Rule::Hard);
      if (std::abs(want - got) > tol) {
        return "case " + std::to_string(c) + ": |" + std::to_string(got) + " - " +
               std::to_string(want) + "| > " + std::to_string(tol);
      }
    }
  }
  return {};
}

std::string check_sphere_sampler(uint64_t seed) {
  const CounterRng rng(seed, RngStream::Batch);
  SamplerSpec full;
  double sum[3] = {0, 0, 0};
  const int n = 1000000;
  const int batch = 1000;
  for (int step = 0; step < n / batch; ++step) {
    const MeasurementBatch mb = sample_directions(rng, static_cast<uint64_t>(step), 1, batch, full);
    for (int b = 0; b < batch; ++b) {
      const double* d = mb.dir(b, 0);
      const double norm = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
      if (std::abs(norm - 1.0) > 1e-12) return "non-unit direction";
      for (int k = 0; k < 3; ++k) sum[k] += d[k];
    }
  }
  for (int k = 0; k < 3; ++k) {
    if (std::abs(sum[k] / n) > 0.005) {
      return "component " + std::to_string(k) + " mean " + std::to_string(sum[k] / n);
    }
  }
  return {};
}

std::string check_planar_sampler(uint64_t seed) {
  const CounterRng rng(seed, RngStream::Batch);
  SamplerSpec planar;
  planar.kind = SamplerKind::Planar;
  const MeasurementBatch mb = sample_directions(rng, 7, 2, 500, planar);
  for (int b = 0; b < 500; ++b) {
    for (int j = 0; j < 2; ++j) {
      const double* d = mb.dir(b, j);
      if (d[2] != 0.0) return "z component not exactly zero";
      const double norm = std::sqrt(d[0] * d[0] + d[1] * d[1]);
      if (std::abs(norm - 1.0) > 1e-12) return "non-unit planar direction";
    }
  }
  return {};
}

std::string check_checkpoint_roundtrip(uint64_t seed) {
  for (const Precision prec : {Precision::F32, Precision::F64}) {
    const HiddenStateCloud c = init_cloud(3, 2, 64, prec, seed + 17, 0.9);
    const std::string path =
        (fs::temp_directory_path() /
         ("lhv_validate_ckpt_" + std::to_string(seed) + "_" +
          std::to_string(static_cast<int>(prec)) + ".lhvc"))
            .string();
    save_cloud(c, path);
    const HiddenStateCloud back = load_cloud(path);
    fs::remove(path);
    if (back.precision != c.precision || back.degree != c.degree || back.spins != c.spins ||
        back.samples != c.samples) {
      return "header mismatch after round trip";
    }
    if (back.f32 != c.f32 || back.f64 != c.f64) return "payload mismatch after round trip";
  }
  return {};
}

std::string check_training_determinism(uint64_t seed) {
  TrainConfig cfg;
  cfg.steps = 60;
  cfg.batch = 16;
  cfg.n_hidden = 64;
  cfg.degree = 1;
  cfg.precision = Precision::F32;
  cfg.seed = seed;
  cfg.trace_stride = 10;
  cfg.lr_per_sample = 3e-4;
  const DensityMatrix rho = werner_state(0.3);
  const TrainResult a = train(rho, cfg);
  const TrainResult b = train(rho, cfg);
  if (a.cloud.f32 != b.cloud.f32) return "clouds differ between identical runs";
  if (a.trace.raw != b.trace.raw) return "traces differ between identical runs";
  return {};
}

std::string check_eval_symmetry(uint64_t seed) {
  const HiddenStateCloud cloud = init_cloud(3, 2, 128, Precision::F64, seed + 5, 0.8);
  const ShBasis basis(3);
  const CounterRng rng(seed, RngStream::Generic);
  for (int t = 0; t < 10; ++t) {
    double dirs[6];
    for (int j = 0; j < 2; ++j) {
      const auto v = rng.sphere(40000 + t, static_cast<uint64_t>(j));
      for (int k = 0; k < 3; ++k) dirs[3 * j + k] = v[k];
    }
    for (const Rule rule : {Rule::Soft, Rule::Hard}) {
      double total = 0.0;
      for (int mask = 0; mask < 4; ++mask) {
        const std::vector<int> outcomes = {(mask & 1) ? 1 : -1, (mask & 2) ? 1 : -1};
        total += lhv_outcome_prob(cloud, basis, dirs, outcomes, rule);
      }
      if (std::abs(total - 1.0) > 1e-10) {
        return "lhv outcome distribution sums to " + std::to_string(total);
      }
      double flipped[6] = {dirs[0], dirs[1], dirs[2], -dirs[3], -dirs[4], -dirs[5]};
      const double a = lhv_outcome_prob(cloud, basis, dirs, {1, -1}, rule);
      const double b = lhv_outcome_prob(cloud, basis, flipped, {1, 1}, rule);
      if (a != b) return "outcome flip is not bitwise equal to direction negation";
    }
  }
  return {};
}

std::string check_single_spin_density(uint64_t seed) {
  // Quadrature frame aligned with r and split at the r.lam = 0 kink, where
  // the density is polynomial per hemisphere, so the rule is exact.
  const Eigen::Vector3d r(0.27, -0.18, 0.72);
  const Eigen::Vector3d e3 = r.normalized();
  const Eigen::Vector3d e1 = e3.unitOrthogonal();
  const Eigen::Vector3d e2 = e3.cross(e1);
  const auto gl = gauss_legendre(32);
  const int n_phi = 64;
  double total = 0.0;
  for (const double a : {-1.0, 0.0}) {
    for (size_t i = 0; i < gl.nodes.size(); ++i) {
      const double t = a + 0.5 + 0.5 * gl.nodes[i];
      const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
      double ring = 0.0;
      for (int p = 0; p < n_phi; ++p) {
        const double phi = 2.0 * 3.14159265358979323846 * p / n_phi;
        const Eigen::Vector3d lam = s * std::cos(phi) * e1 + s * std::sin(phi) * e2 + t * e3;
        ring += exact_single_spin_density(r, lam);
      }
      total += 0.5 * gl.weights[i] * ring * (2.0 * 3.14159265358979323846 / n_phi);
    }
  }
  if (std::abs(total - 1.0) > 1e-12) return "density integrates to " + std::to_string(total);

  const CounterRng rng(seed, RngStream::Probe);
  const Eigen::Vector3d up(0.0, 0.0, 1.0);
  double mean_z = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    mean_z += sample_exact_single_spin(up, rng, 70000 + i).z();
  }
  mean_z /= n;
  if (std::abs(mean_z - 2.0 / 3.0) > 0.015) {
    return "pure-state sampler mean z = " + std::to_string(mean_z) + ", expected 2/3";
  }
  return {};
}

std::string check_sh_orthonormality() {
  const ShBasis basis(5);
  const int d = basis.dim();
  const auto gl = gauss_legendre(48);
  const int n_phi = 96;
  std::vector<double> gram(static_cast<size_t>(d) * d, 0.0);
  std::vector<double> vals(static_cast<size_t>(d));
  for (size_t i = 0; i < gl.nodes.size(); ++i) {
    const double z = gl.nodes[i];
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (int p = 0; p < n_phi; ++p) {
      const double phi = 2.0 * 3.14159265358979323846 * p / n_phi;
      basis.eval(s * std::cos(phi), s * std::sin(phi), z, vals.data());
      const double w = gl.weights[i] * (2.0 * 3.14159265358979323846 / n_phi);
      for (int a = 0; a < d; ++a) {
        for (int b = a; b < d; ++b) {
          gram[static_cast<size_t>(a) * d + b] += w * vals[static_cast<size_t>(a)] *
                                                  vals[static_cast<size_t>(b)];
        }
      }
    }
  }
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) {
      const double want = a == b ? 1.0 : 0.0;
      if (std::abs(gram[static_cast<size_t>(a) * d + b] - want) > 1e-6) {
        return "gram(" + std::to_string(a) + "," + std::to_string(b) + ") = " +
               std::to_string(gram[static_cast<size_t>(a) * d + b]);
      }
    }
  }
  return {};
}

}  // namespace

ValidationReport validate_suite(uint64_t seed) {
  CheckRunner runner;
  runner.run("scalar kl reference value", check_scalar_kl);
  runner.run("qm outcome normalization", [&] { return check_qm_normalization(seed); });
  runner.run("single-qubit two-direction bound", [&] { return check_single_qubit_bound(seed); });
  runner.run("analytic gradient vs finite differences", [&] { return check_gradient_fd(seed); });
  runner.run("separable cloud reproduces qm", [&] { return check_separable_oracle(seed); });
  runner.run("sphere sampler statistics", [&] { return check_sphere_sampler(seed); });
  runner.run("planar sampler in plane", [&] { return check_planar_sampler(seed); });
  runner.run("checkpoint round trip", [&] { return check_checkpoint_roundtrip(seed); });
  runner.run("training determinism", [&] { return check_training_determinism(seed); });
  runner.run("evaluation outcome symmetry", [&] { return check_eval_symmetry(seed); });
  runner.run("single-spin density and sampler", [&] { return check_single_spin_density(seed); });
  runner.run("spherical-harmonics orthonormality", check_sh_orthonormality);
  return runner.report;
}

}  // namespace lhv
