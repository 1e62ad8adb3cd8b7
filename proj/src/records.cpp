#include "lhv/records.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

#include "lhv/stats.hpp"

namespace lhv {

uint64_t sweep_key(const std::string& state_json, const std::string& param_name,
                   uint64_t config_hash) {
  std::ostringstream os;
  os << state_json << '|' << param_name << '|' << std::hex << config_hash;
  return fnv1a(os.str());
}

uint64_t SweepRecord::resume_key() const { return sweep_key(state_json, param_name, config_hash); }

std::string SweepRecord::to_line() const {
  nlohmann::json j;
  j["schema_version"] = schema_version;
  j["state"] = nlohmann::json::parse(state_json);
  j["param_name"] = param_name;
  j["param_value"] = param_value;
  j["config"] = nlohmann::json::parse(config_json);
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["plateau"] = plateau;
  j["floor"] = floor;
  j["threshold_factor"] = threshold_factor;
  j["classification"] = classification;
  j["wall_seconds"] = wall_seconds;
  auto tr = nlohmann::json::array();
  for (const auto& [step, loss] : trace) tr.push_back({step, loss});
  j["trace"] = tr;
  j["checkpoint"] = checkpoint;
  j["pass"] = pass;
  j["note"] = note;
  return j.dump();
}

SweepRecord SweepRecord::from_line(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("record line: bad JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("schema_version")) {
    throw std::invalid_argument("record line: missing schema_version");
  }
  SweepRecord r;
  r.schema_version = j["schema_version"].get<int>();
  if (r.schema_version != kRecordSchemaVersion) {
    throw std::runtime_error("records: schema version " + std::to_string(r.schema_version) +
                             " unsupported (expected " + std::to_string(kRecordSchemaVersion) +
                             ")");
  }
  try {
    r.state_json = j.at("state").dump();
    r.param_name = j.at("param_name").get<std::string>();
    r.param_value = j.at("param_value").get<double>();
    r.config_json = j.at("config").dump();
    r.config_hash = j.at("config_hash").get<uint64_t>();
    r.seed = j.at("seed").get<uint64_t>();
    r.plateau = j.at("plateau").get<double>();
    r.floor = j.at("floor").get<double>();
    r.threshold_factor = j.at("threshold_factor").get<double>();
    r.classification = j.at("classification").get<std::string>();
    r.wall_seconds = j.at("wall_seconds").get<double>();
    for (const auto& e : j.at("trace")) {
      r.trace.emplace_back(e.at(0).get<int64_t>(), e.at(1).get<double>());
    }
    r.checkpoint = j.at("checkpoint").get<std::string>();
    r.pass = j.at("pass").get<std::string>();
    r.note = j.at("note").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("record line: bad field: ") + e.what());
  }
  return r;
}

std::string classify_plateau(double plateau, double floor, double threshold_factor,
                             double boundary_factor) {
  if (plateau > threshold_factor * floor) return "non-local";
  if (plateau >= boundary_factor * floor) return "boundary";
  return "local";
}

RecordWriter::RecordWriter(std::string path) : path_(std::move(path)) {
  namespace fs = std::filesystem;
  const fs::path p(path_);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  if (!fs::exists(p) || fs::file_size(p) == 0) {
    std::ofstream out(path_, std::ios::app);
    if (!out) throw std::runtime_error("records: cannot open " + path_);
    out << "# lhv sweep records, one JSON object per line, schema v"
        << kRecordSchemaVersion << "\n";
  }
}

void RecordWriter::append(const SweepRecord& rec) {
  const std::string line = rec.to_line();
  std::lock_guard<std::mutex> lock(mu_);
  std::ofstream out(path_, std::ios::app);
  if (!out) throw std::runtime_error("records: cannot open " + path_);
  out << line << '\n';
  out.flush();
}

std::vector<SweepRecord> load_records(const std::string& path, bool lenient) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("records: cannot open " + path);
  std::vector<SweepRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    try {
      out.push_back(SweepRecord::from_line(line));
    } catch (const std::invalid_argument&) {
      if (!lenient) throw;
    }
  }
  return out;
}

std::unordered_set<uint64_t> completed_keys(const std::string& path) {
  std::unordered_set<uint64_t> keys;
  if (!std::filesystem::exists(path)) return keys;
  for (const auto& r : load_records(path, /*lenient=*/true)) keys.insert(r.resume_key());
  return keys;
}

void export_csv(const std::vector<SweepRecord>& recs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("records: cannot open " + path);
  out << "parameter,plateau_loss,classification\n";
  for (const auto& r : recs) {
    std::ostringstream row;
    row.precision(17);
    row << r.param_value << ',' << r.plateau << ',' << r.classification << '\n';
    out << row.str();
  }
}

}  // namespace lhv
