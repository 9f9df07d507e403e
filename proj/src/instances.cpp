#include "stow/instances.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace stow {

Eigen::MatrixXd demand_upper_bounds(const VoyageConfig& cfg,
                                    const TransportIndex& ti,
                                    const std::vector<CargoClass>& classes) {
  int max_ob = 0;
  for (int p = 1; p < cfg.n_ports; ++p)
    max_ob = std::max(max_ob, static_cast<int>(ti.on_board(p).size()));
  const double n_k = static_cast<double>(classes.size());
  Eigen::MatrixXd ub(ti.size(), classes.size());
  for (int t = 0; t < ti.size(); ++t)
    for (std::size_t k = 0; k < classes.size(); ++k)
      ub(t, static_cast<int>(k)) =
          2.0 * cfg.ur * cfg.total_teu / (classes[k].teu * n_k * max_ob);
  return ub;
}

Scenario sample_scenario(const VoyageConfig& cfg, const TransportIndex& ti,
                         const std::vector<CargoClass>& classes, Rng& rng,
                         const std::string& mode) {
  const bool integral = (mode == "integral");
  if (!integral && mode != "continuous")
    throw std::invalid_argument("sample_scenario: unknown mode " + mode);
  const Eigen::MatrixXd ub = demand_upper_bounds(cfg, ti, classes);
  Scenario sc;
  const int nt = ti.size(), nk = static_cast<int>(classes.size());
  sc.q.resize(nt, nk);
  sc.ub_pert.resize(nt, nk);
  sc.mu.resize(nt, nk);
  sc.sigma.resize(nt, nk);
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < nk; ++k) {
      const double u = rng.uniform();
      const double ubp = ub(t, k) * (1.0 + (2.0 * u - 1.0) * cfg.rho);
      sc.ub_pert(t, k) = ubp;
      sc.mu(t, k) = ubp / 2.0;
      sc.sigma(t, k) = ubp / std::sqrt(12.0);
      double q;
      if (integral) {
        const auto hi = static_cast<std::int64_t>(std::floor(ubp));
        if (hi < 1) {
          q = 1.0;
          ++sc.clamp_warnings;
        } else {
          q = static_cast<double>(rng.uniform_int(1, hi));
        }
      } else {
        if (ubp <= 1.0) {
          q = 1.0;
          ++sc.clamp_warnings;
        } else {
          q = rng.uniform(1.0, ubp);
        }
      }
      sc.q(t, k) = q;
    }
  }
  return sc;
}

Scenario scenario_for_episode(const VoyageConfig& cfg, const TransportIndex& ti,
                              const std::vector<CargoClass>& classes,
                              std::uint64_t base_seed, int episode_index,
                              const std::string& mode) {
  Rng rng(mix_seed(mix_seed(base_seed, stream_id::demand),
                   static_cast<std::uint64_t>(episode_index)));
  Scenario sc = sample_scenario(cfg, ti, classes, rng, mode);
  sc.base_seed = base_seed;
  sc.episode_index = episode_index;
  return sc;
}

Scenario scenario_for_episode(const VoyageConfig& cfg, std::uint64_t base_seed,
                              int episode_index) {
  const TransportIndex ti(cfg.n_ports);
  const auto classes = cargo_catalog(cfg);
  return scenario_for_episode(cfg, ti, classes, base_seed, episode_index,
                              cfg.demand_mode);
}

std::uint64_t matrix_digest(const Eigen::MatrixXd& m) {
  std::string bytes;
  bytes.reserve(static_cast<std::size_t>(m.size()) * 24);
  char buf[32];
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g,", m(i, j));
      bytes += buf;
    }
  return fnv1a64(bytes);
}

void write_demand_csv(const Scenario& sc, const TransportIndex& ti,
                      const VoyageConfig& cfg, const std::string& csv_path,
                      const std::string& sidecar_path) {
  std::ofstream out(csv_path);
  if (!out) throw std::runtime_error("cannot write " + csv_path);
  out << "pol,pod,class_id,quantity\n";
  char buf[64];
  for (int t = 0; t < ti.size(); ++t)
    for (int k = 0; k < sc.q.cols(); ++k) {
      std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.17g\n", ti.at(t).pol,
                    ti.at(t).pod, k, sc.q(t, k));
      out << buf;
    }
  nlohmann::json j;
  j["version"] = kToolVersion;
  j["config_digest"] = digest_hex(config_digest(cfg));
  j["seed"] = sc.base_seed;
  j["episode_index"] = sc.episode_index;
  j["rho"] = cfg.rho;
  j["ub_pert_digest"] = digest_hex(matrix_digest(sc.ub_pert));
  j["clamp_warnings"] = sc.clamp_warnings;
  std::ofstream side(sidecar_path);
  if (!side) throw std::runtime_error("cannot write " + sidecar_path);
  side << j.dump(2) << "\n";
}

Eigen::MatrixXd read_demand_csv(const std::string& csv_path,
                                const TransportIndex& ti, int n_classes) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open " + csv_path);
  std::string line;
  std::getline(in, line);  // header
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(ti.size(), n_classes);
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    int pol, pod, k;
    double v;
    std::getline(ss, cell, ',');
    pol = std::stoi(cell);
    std::getline(ss, cell, ',');
    pod = std::stoi(cell);
    std::getline(ss, cell, ',');
    k = std::stoi(cell);
    std::getline(ss, cell, ',');
    v = std::stod(cell);
    q(ti.index_of(pol, pod), k) = v;
  }
  return q;
}

}  // namespace stow
