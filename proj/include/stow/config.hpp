#ifndef STOW_CONFIG_HPP
#define STOW_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace stow {

// Voyage-level problem description: vessel geometry, cargo class catalog
// generators, revenue and cost coefficients, demand model knobs.
//
// Serialized form is a JSON object whose keys match the field names below;
// unknown keys are rejected so typos fail loudly. `capacity` may be given
// explicitly (flat, location-major) or derived as a uniform split of
// `total_teu` over all locations.
struct VoyageConfig {
  int n_ports = 4;
  int n_bays = 20;
  int n_decks = 2;   // deck 0 = hold (below), deck 1 = on-deck
  int n_blocks = 2;

  double total_teu = 20000.0;
  std::vector<double> capacity;  // TEU per location, size n_locations()

  // cargo class catalog generators; subsets allow small test instances
  std::vector<std::string> sizes = {"20ft", "40ft"};
  std::vector<std::string> weights = {"Light", "Medium", "Heavy"};
  std::vector<std::string> customers = {"Spot", "Long"};

  double lr = 0.3;   // long-term contract revenue reduction
  double sr = 1.0;   // flat revenue add-on per container
  double ur = 1.1;   // target utilization rate of total capacity

  double lcg_lb = 0.85, lcg_ub = 1.05;
  double vcg_lb = 0.95, vcg_ub = 1.15;

  double delta_cm = 0.25;  // tolerated fraction above the even crane split
  double ct_ho = 0.33;     // cost per overstowing container
  double ct_cm = 0.5;      // cost per excess crane move

  double big_m = 1e5;      // fallback linking bound when no tighter one exists
  double rho = 0.5;        // demand bound perturbation half-width
  double feas_tol = 1e-4;  // absolute feasibility tolerance on raw residuals

  std::string demand_mode = "continuous";  // or "integral"

  int n_locations() const { return n_bays * n_decks * n_blocks; }
  int location_index(int b, int d, int bl) const {
    return (b * n_decks + d) * n_blocks + bl;
  }

  void validate() const;  // throws std::invalid_argument on violation
};

VoyageConfig config_from_json_text(const std::string& text);
VoyageConfig load_config(const std::string& path);
std::string config_to_json_text(const VoyageConfig& cfg);  // canonical form
void save_config(const VoyageConfig& cfg, const std::string& path);

// FNV-1a 64-bit digest of the canonical JSON encoding; pairs artifacts
// (checkpoints, traces, result tables) with the exact config that made them.
std::uint64_t config_digest(const VoyageConfig& cfg);
std::string digest_hex(std::uint64_t digest);

std::uint64_t fnv1a64(const std::string& bytes);

inline constexpr const char* kToolVersion = "stowlab 0.1.0";

}  // namespace stow

#endif
