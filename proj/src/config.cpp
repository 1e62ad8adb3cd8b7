#include "lhv/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "lhv/stats.hpp"

namespace lhv {

namespace {

using nlohmann::json;

const char* sampler_name(SamplerKind k) {
  return k == SamplerKind::FullSphere ? "full_sphere" : "planar";
}

SamplerKind sampler_from_name(const std::string& s) {
  if (s == "full_sphere") return SamplerKind::FullSphere;
  if (s == "planar") return SamplerKind::Planar;
  throw std::invalid_argument("unknown sampler '" + s + "' (full_sphere|planar)");
}

const char* optimizer_name(OptimizerKind k) {
  return k == OptimizerKind::Adam ? "adam" : "sgd";
}

OptimizerKind optimizer_from_name(const std::string& s) {
  if (s == "adam") return OptimizerKind::Adam;
  if (s == "sgd") return OptimizerKind::Sgd;
  throw std::invalid_argument("unknown optimizer '" + s + "' (adam|sgd)");
}

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw std::invalid_argument("unknown config key '" + it.key() + "' in " +
                                  where);
}

}  // namespace

double TrainConfig::lr_at(int64_t step) const {
  const double lr0 = effective_lr();
  if (lr_final_factor == 1.0) return lr0;
  const int64_t t0 = static_cast<int64_t>(decay_start * static_cast<double>(steps));
  if (step < t0) return lr0;
  const double span = static_cast<double>(steps - 1 - t0);
  const double u = span > 0 ? static_cast<double>(step - t0) / span : 1.0;
  return lr0 * std::pow(lr_final_factor, u);
}

void TrainConfig::validate() const {
  if (steps < 1) throw std::invalid_argument("config: steps must be >= 1");
  if (batch < 1) throw std::invalid_argument("config: batch must be >= 1");
  if (!(lr_per_sample > 0.0))
    throw std::invalid_argument("config: lr_per_sample must be > 0");
  if (degree < 1 || degree % 2 == 0)
    throw std::invalid_argument("config: degree must be odd and >= 1");
  if (n_hidden < 1) throw std::invalid_argument("config: n_hidden must be >= 1");
  if (diffusion.active_fraction < 0.0 || diffusion.active_fraction > 1.0)
    throw std::invalid_argument("config: diffusion.active_fraction must be in [0,1]");
  if (diffusion.amplitude < 0.0)
    throw std::invalid_argument("config: diffusion.amplitude must be >= 0");
  if (!(lr_final_factor > 0.0))
    throw std::invalid_argument("config: lr_final_factor must be > 0");
  if (decay_start < 0.0 || decay_start > 1.0)
    throw std::invalid_argument("config: decay_start must be in [0,1]");
  if (trace_stride < 1)
    throw std::invalid_argument("config: trace_stride must be >= 1");
  if (stop_below_loss < 0.0)
    throw std::invalid_argument("config: stop_below_loss must be >= 0");
  const double n2 = sampler.normal[0] * sampler.normal[0] +
                    sampler.normal[1] * sampler.normal[1] +
                    sampler.normal[2] * sampler.normal[2];
  if (sampler.kind == SamplerKind::Planar && n2 < 1e-12)
    throw std::invalid_argument("config: planar sampler needs a nonzero normal");
}

std::string TrainConfig::to_json() const {
  json j;
  j["steps"] = steps;
  j["batch"] = batch;
  j["lr_per_sample"] = lr_per_sample;
  j["degree"] = degree;
  j["n_hidden"] = n_hidden;
  j["precision"] = precision_name(precision);
  j["sampler"] = {{"kind", sampler_name(sampler.kind)},
                  {"normal", sampler.normal}};
  j["diffusion"] = {{"enabled", diffusion.enabled},
                    {"amplitude", diffusion.amplitude},
                    {"active_fraction", diffusion.active_fraction}};
  j["optimizer"] = {{"kind", optimizer_name(optimizer.kind)},
                    {"beta1", optimizer.beta1},
                    {"beta2", optimizer.beta2},
                    {"eps", optimizer.eps}};
  j["seed"] = seed;
  j["trace_stride"] = trace_stride;
  j["lr_final_factor"] = lr_final_factor;
  j["decay_start"] = decay_start;
  j["init_scale"] = init_scale;
  j["stop_below_loss"] = stop_below_loss;
  return j.dump(2);
}

TrainConfig TrainConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  check_keys(j,
             {"steps", "batch", "lr_per_sample", "degree", "n_hidden",
              "precision", "sampler", "diffusion", "optimizer", "seed",
              "trace_stride", "lr_final_factor", "decay_start", "init_scale",
              "stop_below_loss"},
             "top level");
  TrainConfig c;
  try {
    if (j.contains("steps")) c.steps = j["steps"].get<int64_t>();
    if (j.contains("batch")) c.batch = j["batch"].get<int>();
    if (j.contains("lr_per_sample")) c.lr_per_sample = j["lr_per_sample"].get<double>();
    if (j.contains("degree")) c.degree = j["degree"].get<int>();
    if (j.contains("n_hidden")) c.n_hidden = j["n_hidden"].get<uint64_t>();
    if (j.contains("precision"))
      c.precision = precision_from_name(j["precision"].get<std::string>());
    if (j.contains("sampler")) {
      const json& s = j["sampler"];
      check_keys(s, {"kind", "normal"}, "sampler");
      if (s.contains("kind"))
        c.sampler.kind = sampler_from_name(s["kind"].get<std::string>());
      if (s.contains("normal"))
        c.sampler.normal = s["normal"].get<std::array<double, 3>>();
    }
    if (j.contains("diffusion")) {
      const json& d = j["diffusion"];
      check_keys(d, {"enabled", "amplitude", "active_fraction"}, "diffusion");
      if (d.contains("enabled")) c.diffusion.enabled = d["enabled"].get<bool>();
      if (d.contains("amplitude")) c.diffusion.amplitude = d["amplitude"].get<double>();
      if (d.contains("active_fraction"))
        c.diffusion.active_fraction = d["active_fraction"].get<double>();
    }
    if (j.contains("optimizer")) {
      const json& o = j["optimizer"];
      check_keys(o, {"kind", "beta1", "beta2", "eps"}, "optimizer");
      if (o.contains("kind"))
        c.optimizer.kind = optimizer_from_name(o["kind"].get<std::string>());
      if (o.contains("beta1")) c.optimizer.beta1 = o["beta1"].get<double>();
      if (o.contains("beta2")) c.optimizer.beta2 = o["beta2"].get<double>();
      if (o.contains("eps")) c.optimizer.eps = o["eps"].get<double>();
    }
    if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
    if (j.contains("trace_stride")) c.trace_stride = j["trace_stride"].get<int64_t>();
    if (j.contains("lr_final_factor"))
      c.lr_final_factor = j["lr_final_factor"].get<double>();
    if (j.contains("decay_start")) c.decay_start = j["decay_start"].get<double>();
    if (j.contains("init_scale")) c.init_scale = j["init_scale"].get<double>();
    if (j.contains("stop_below_loss"))
      c.stop_below_loss = j["stop_below_loss"].get<double>();
  } catch (const json::type_error& e) {
    throw std::invalid_argument(std::string("config type error: ") + e.what());
  }
  c.validate();
  return c;
}

TrainConfig TrainConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

uint64_t TrainConfig::hash() const {
  // dump() emits keys in sorted order, so the text is canonical.
  return fnv1a(json::parse(to_json()).dump());
}

}  // namespace lhv
