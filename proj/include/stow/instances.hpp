#ifndef STOW_INSTANCES_HPP
#define STOW_INSTANCES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stow/config.hpp"
#include "stow/core.hpp"
#include "stow/rng.hpp"

namespace stow {

// One realized demand scenario for a whole voyage. q holds every transport
// row; consumers that model progressive disclosure (the env) reveal rows as
// ports are reached. mu/sigma are the moments reported to planners.
struct Scenario {
  Eigen::MatrixXd q;        // |TR| x |K| realized demand
  Eigen::MatrixXd ub_pert;  // perturbed per-episode upper bounds
  Eigen::MatrixXd mu;       // reported mean, ub_pert / 2
  Eigen::MatrixXd sigma;    // reported std, ub_pert / sqrt(12)
  std::uint64_t base_seed = 0;
  int episode_index = 0;
  int clamp_warnings = 0;  // draws hit the lower clamp (perturbed bound < 1)
};

// Deterministic per-class demand upper bounds, sized so that the expected
// on-board TEU at the busiest port equals ur * total_teu.
Eigen::MatrixXd demand_upper_bounds(const VoyageConfig& cfg,
                                    const TransportIndex& ti,
                                    const std::vector<CargoClass>& classes);

// Draws one scenario. Per (transport, class) entry, in row-major order:
// a perturbation draw U ~ U(0,1) scales the bound to ub*(1 + (2U-1)*rho),
// then the quantity draw is U(1, ub_pert) (continuous) or a uniform integer
// in {1..floor(ub_pert)} (integral). Bounds below 1 clamp the draw to 1 and
// bump clamp_warnings.
Scenario sample_scenario(const VoyageConfig& cfg, const TransportIndex& ti,
                         const std::vector<CargoClass>& classes, Rng& rng,
                         const std::string& mode);

// Episode-indexed scenario stream: episode i of base seed s is drawn from an
// independent substream, so instances are reproducible in any order.
Scenario scenario_for_episode(const VoyageConfig& cfg, const TransportIndex& ti,
                              const std::vector<CargoClass>& classes,
                              std::uint64_t base_seed, int episode_index,
                              const std::string& mode);
Scenario scenario_for_episode(const VoyageConfig& cfg, std::uint64_t base_seed,
                              int episode_index);  // mode from cfg

// CSV with columns pol,pod,class_id,quantity plus a JSON sidecar carrying
// seed, episode, mode, rho, the perturbed-bound digest and tool version.
void write_demand_csv(const Scenario& sc, const TransportIndex& ti,
                      const VoyageConfig& cfg, const std::string& csv_path,
                      const std::string& sidecar_path);
Eigen::MatrixXd read_demand_csv(const std::string& csv_path,
                                const TransportIndex& ti, int n_classes);

std::uint64_t matrix_digest(const Eigen::MatrixXd& m);

}  // namespace stow

#endif
