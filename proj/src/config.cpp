#include "stow/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace stow {

using nlohmann::json;

namespace {

const std::set<std::string> kKnownKeys = {
    "n_ports",   "n_bays",    "n_decks",   "n_blocks", "total_teu",
    "capacity",  "sizes",     "weights",   "customers", "lr",
    "sr",        "ur",        "lcg_lb",    "lcg_ub",   "vcg_lb",
    "vcg_ub",    "delta_cm",  "ct_ho",     "ct_cm",    "big_m",
    "rho",       "feas_tol",  "demand_mode"};

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument("config: " + msg);
}

}  // namespace

void VoyageConfig::validate() const {
  require(n_ports >= 2, "n_ports must be >= 2");
  require(n_decks == 2, "n_decks must be 2 (hold and on-deck)");
  require(n_bays >= 2 && n_bays % 2 == 0, "n_bays must be even and >= 2");
  require(n_blocks >= 1, "n_blocks must be >= 1");
  require(!sizes.empty() && !weights.empty() && !customers.empty(),
          "class catalog generators must be non-empty");
  for (const auto& s : sizes)
    require(s == "20ft" || s == "40ft", "unknown size '" + s + "'");
  for (const auto& w : weights)
    require(w == "Light" || w == "Medium" || w == "Heavy",
            "unknown weight '" + w + "'");
  for (const auto& c : customers)
    require(c == "Spot" || c == "Long", "unknown customer '" + c + "'");
  require(lr > 0.0 && lr < 1.0, "lr must lie in (0, 1)");
  require(sr >= 0.0, "sr must be >= 0");
  require(ur > 0.0, "ur must be > 0");
  require(lcg_lb > 0.0 && lcg_lb < lcg_ub, "need 0 < lcg_lb < lcg_ub");
  require(vcg_lb > 0.0 && vcg_lb < vcg_ub, "need 0 < vcg_lb < vcg_ub");
  require(delta_cm >= 0.0, "delta_cm must be >= 0");
  require(ct_ho >= 0.0 && ct_cm >= 0.0, "cost rates must be >= 0");
  require(big_m > 0.0, "big_m must be > 0");
  require(rho >= 0.0 && rho < 1.0, "rho must lie in [0, 1)");
  require(feas_tol > 0.0, "feas_tol must be > 0");
  require(demand_mode == "continuous" || demand_mode == "integral",
          "demand_mode must be 'continuous' or 'integral'");
  require(static_cast<int>(capacity.size()) == n_locations(),
          "capacity tensor size must equal n_bays*n_decks*n_blocks");
  double total = 0.0;
  for (double c : capacity) {
    require(c >= 0.0, "capacity entries must be >= 0");
    total += c;
  }
  require(total > 0.0, "total capacity must be positive");
  require(std::abs(total - total_teu) <= 1e-9 * std::max(1.0, total_teu),
          "total_teu must equal the capacity tensor sum");
}

VoyageConfig config_from_json_text(const std::string& text) {
  json j = json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("config: not a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!kKnownKeys.count(it.key()))
      throw std::invalid_argument("config: unknown key '" + it.key() + "'");
  }
  VoyageConfig cfg;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("n_ports", cfg.n_ports);
  get("n_bays", cfg.n_bays);
  get("n_decks", cfg.n_decks);
  get("n_blocks", cfg.n_blocks);
  get("total_teu", cfg.total_teu);
  get("sizes", cfg.sizes);
  get("weights", cfg.weights);
  get("customers", cfg.customers);
  get("lr", cfg.lr);
  get("sr", cfg.sr);
  get("ur", cfg.ur);
  get("lcg_lb", cfg.lcg_lb);
  get("lcg_ub", cfg.lcg_ub);
  get("vcg_lb", cfg.vcg_lb);
  get("vcg_ub", cfg.vcg_ub);
  get("delta_cm", cfg.delta_cm);
  get("ct_ho", cfg.ct_ho);
  get("ct_cm", cfg.ct_cm);
  get("big_m", cfg.big_m);
  get("rho", cfg.rho);
  get("feas_tol", cfg.feas_tol);
  get("demand_mode", cfg.demand_mode);
  if (j.contains("capacity")) {
    cfg.capacity = j.at("capacity").get<std::vector<double>>();
    if (!j.contains("total_teu")) {
      cfg.total_teu = 0.0;
      for (double c : cfg.capacity) cfg.total_teu += c;
    }
  } else {
    const int n = cfg.n_locations();
    cfg.capacity.assign(n, cfg.total_teu / n);
  }
  cfg.validate();
  return cfg;
}

VoyageConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

std::string config_to_json_text(const VoyageConfig& cfg) {
  json j;
  j["n_ports"] = cfg.n_ports;
  j["n_bays"] = cfg.n_bays;
  j["n_decks"] = cfg.n_decks;
  j["n_blocks"] = cfg.n_blocks;
  j["total_teu"] = cfg.total_teu;
  j["capacity"] = cfg.capacity;
  j["sizes"] = cfg.sizes;
  j["weights"] = cfg.weights;
  j["customers"] = cfg.customers;
  j["lr"] = cfg.lr;
  j["sr"] = cfg.sr;
  j["ur"] = cfg.ur;
  j["lcg_lb"] = cfg.lcg_lb;
  j["lcg_ub"] = cfg.lcg_ub;
  j["vcg_lb"] = cfg.vcg_lb;
  j["vcg_ub"] = cfg.vcg_ub;
  j["delta_cm"] = cfg.delta_cm;
  j["ct_ho"] = cfg.ct_ho;
  j["ct_cm"] = cfg.ct_cm;
  j["big_m"] = cfg.big_m;
  j["rho"] = cfg.rho;
  j["feas_tol"] = cfg.feas_tol;
  j["demand_mode"] = cfg.demand_mode;
  return j.dump(2);  // nlohmann sorts object keys, so this is canonical
}

void save_config(const VoyageConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("config: cannot write " + path);
  out << config_to_json_text(cfg) << "\n";
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t config_digest(const VoyageConfig& cfg) {
  return fnv1a64(config_to_json_text(cfg));
}

std::string digest_hex(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(digest));
  return std::string(buf);
}

}  // namespace stow
