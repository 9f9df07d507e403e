#ifndef STOW_CORE_HPP
#define STOW_CORE_HPP

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "stow/config.hpp"

namespace stow {

// A transport is an origin/destination port pair (pol, pod), 1-based,
// pol < pod. Transports are ordered lexicographically and indexed densely.
struct Transport {
  int pol = 0;
  int pod = 0;
  bool operator==(const Transport&) const = default;
};

// Enumerates the transport set of a voyage and its port-indexed subsets:
//   on_board(p)  transports crossing the berth at p (loaded at or before p,
//                discharged after p)
//   rob(p)       remain-on-board: loaded strictly before p, discharged after
//   inbound(p)   discharged at p
//   outbound(p)  loaded at p
//   moved(p)     outbound(p) plus inbound(p)
class TransportIndex {
 public:
  explicit TransportIndex(int n_ports);

  int n_ports() const { return n_ports_; }
  int size() const { return static_cast<int>(all_.size()); }
  const std::vector<Transport>& all() const { return all_; }
  Transport at(int idx) const { return all_[idx]; }
  int index_of(int pol, int pod) const;  // throws if no such transport

  const std::vector<int>& on_board(int p) const { return on_board_[p]; }
  const std::vector<int>& rob(int p) const { return rob_[p]; }
  const std::vector<int>& inbound(int p) const { return inbound_[p]; }
  const std::vector<int>& outbound(int p) const { return outbound_[p]; }
  const std::vector<int>& moved(int p) const { return moved_[p]; }

 private:
  int n_ports_;
  std::vector<Transport> all_;
  // indexed 1..n_ports; entry 0 unused
  std::vector<std::vector<int>> on_board_, rob_, inbound_, outbound_, moved_;
};

// One cargo class: container size x weight class x customer contract type.
struct CargoClass {
  int id = 0;
  std::string name;    // e.g. "20ft_Light_Spot"
  int teu = 1;         // 1 for 20ft, 2 for 40ft
  double weight = 1.0; // 1 Light, 2 Medium, 3 Heavy
  bool long_term = false;
};

// Ordered catalog of the classes generated by the config lists
// (size-major, then weight, then customer).
std::vector<CargoClass> cargo_catalog(const VoyageConfig& cfg);

// Revenue per container of class k on transport (pol, pod): proportional to
// the sailing distance in port legs, reduced by lr for long-term contracts,
// plus the flat add-on sr.
double revenue(const Transport& tr, const CargoClass& k, const VoyageConfig& cfg);

// |TR| x |K| revenue matrix in transport/class index order.
Eigen::MatrixXd revenue_matrix(const TransportIndex& ti,
                               const std::vector<CargoClass>& classes,
                               const VoyageConfig& cfg);

// Normalized longitudinal position of bay b (0-based): fore = small values.
// Averages to 1 over the vessel.
double longitudinal_position(int b, int n_bays);
// Normalized vertical position of deck d (0-based, 0 = hold).
double vertical_position(int d, int n_decks);

// Per-location geometry columns, location-major order.
struct Geometry {
  Eigen::VectorXd ld;  // longitudinal position of the location's bay
  Eigen::VectorXd vd;  // vertical position of the location's deck
};
Geometry location_geometry(const VoyageConfig& cfg);

}  // namespace stow

#endif
