#include "lhv/statespec.hpp"

#include <json.hpp>
#include <set>
#include <sstream>
#include <stdexcept>

#include "lhv/xxz.hpp"

namespace lhv {

namespace {

void require_keys(const nlohmann::json& j, const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (allowed.find(it.key()) == allowed.end()) {
      throw std::invalid_argument("state spec: unknown key '" + it.key() + "'");
    }
  }
  for (const auto& k : allowed) {
    if (!j.contains(k)) throw std::invalid_argument("state spec: missing key '" + k + "'");
  }
}

}  // namespace

int StateSpec::n_spins() const {
  if (kind == "product") return static_cast<int>(blochs.size());
  if (kind == "werner" || kind == "xxz_two_spin") return 2;
  if (kind == "ghz") return spins;
  if (kind == "w") return 3;
  if (kind == "xxz_chain_subsystem") return sub_size;
  throw std::invalid_argument("state spec: unknown kind '" + kind + "'");
}

DensityMatrix StateSpec::build() const {
  if (kind == "product") {
    if (blochs.empty()) throw std::invalid_argument("state spec: product needs bloch vectors");
    return product_state(blochs);
  }
  if (kind == "werner") return werner_state(v);
  if (kind == "ghz") return ghz_state(spins, v);
  if (kind == "w") return w_state(v);
  if (kind == "xxz_two_spin") return xxz_symmetric_two_spin(cx, cz);
  if (kind == "xxz_chain_subsystem") {
    SpinChainSpec spec;
    spec.length = length;
    spec.delta = delta;
    spec.periodic = periodic;
    if (sub_start < 0 || sub_size < 1 || sub_start + sub_size > length) {
      throw std::invalid_argument("state spec: sub-chain out of range");
    }
    const GroundState gs = ground_state(spec);
    std::vector<int> keep(static_cast<size_t>(sub_size));
    for (int i = 0; i < sub_size; ++i) keep[static_cast<size_t>(i)] = sub_start + i;
    return partial_trace_vec(gs.psi.cast<std::complex<double>>(), length, keep);
  }
  throw std::invalid_argument("state spec: unknown kind '" + kind + "'");
}

std::string StateSpec::describe() const {
  std::ostringstream os;
  if (kind == "product") {
    os << "product N=" << blochs.size();
  } else if (kind == "werner") {
    os << "werner v=" << v;
  } else if (kind == "ghz") {
    os << "ghz N=" << spins << " v=" << v;
  } else if (kind == "w") {
    os << "w v=" << v;
  } else if (kind == "xxz_two_spin") {
    os << "xxz_two_spin cx=" << cx << " cz=" << cz;
  } else if (kind == "xxz_chain_subsystem") {
    os << "xxz_chain L=" << length << (periodic ? " periodic" : " open") << " delta=" << delta
       << " sub=[" << sub_start << "," << sub_start + sub_size << ")";
  } else {
    os << "unknown";
  }
  return os.str();
}

std::string StateSpec::to_json() const {
  nlohmann::json j;  // object keys serialize sorted, giving a canonical form
  j["kind"] = kind;
  if (kind == "product") {
    auto arr = nlohmann::json::array();
    for (const auto& b : blochs) arr.push_back({b[0], b[1], b[2]});
    j["blochs"] = arr;
  } else if (kind == "werner" || kind == "w") {
    j["v"] = v;
  } else if (kind == "ghz") {
    j["spins"] = spins;
    j["v"] = v;
  } else if (kind == "xxz_two_spin") {
    j["cx"] = cx;
    j["cz"] = cz;
  } else if (kind == "xxz_chain_subsystem") {
    j["delta"] = delta;
    j["length"] = length;
    j["periodic"] = periodic;
    j["sub_start"] = sub_start;
    j["sub_size"] = sub_size;
  } else {
    throw std::invalid_argument("state spec: unknown kind '" + kind + "'");
  }
  return j.dump();
}

StateSpec StateSpec::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("state spec: bad JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw std::invalid_argument("state spec: expected an object with a 'kind'");
  }
  StateSpec s;
  s.kind = j["kind"].get<std::string>();
  try {
    if (s.kind == "product") {
      require_keys(j, {"kind", "blochs"});
      s.blochs.clear();
      for (const auto& b : j["blochs"]) {
        if (!b.is_array() || b.size() != 3) {
          throw std::invalid_argument("state spec: bloch entries must be 3-vectors");
        }
        s.blochs.push_back({b[0].get<double>(), b[1].get<double>(), b[2].get<double>()});
      }
    } else if (s.kind == "werner" || s.kind == "w") {
      require_keys(j, {"kind", "v"});
      s.v = j["v"].get<double>();
    } else if (s.kind == "ghz") {
      require_keys(j, {"kind", "spins", "v"});
      s.spins = j["spins"].get<int>();
      s.v = j["v"].get<double>();
    } else if (s.kind == "xxz_two_spin") {
      require_keys(j, {"kind", "cx", "cz"});
      s.cx = j["cx"].get<double>();
      s.cz = j["cz"].get<double>();
    } else if (s.kind == "xxz_chain_subsystem") {
      require_keys(j, {"kind", "delta", "length", "periodic", "sub_start", "sub_size"});
      s.delta = j["delta"].get<double>();
      s.length = j["length"].get<int>();
      s.periodic = j["periodic"].get<bool>();
      s.sub_start = j["sub_start"].get<int>();
      s.sub_size = j["sub_size"].get<int>();
    } else {
      throw std::invalid_argument("state spec: unknown kind '" + s.kind + "'");
    }
  } catch (const nlohmann::json::type_error& e) {
    throw std::invalid_argument(std::string("state spec: wrong field type: ") + e.what());
  }
  return s;
}

}  // namespace lhv
