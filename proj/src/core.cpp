#include "stow/core.hpp"

#include <stdexcept>

namespace stow {

TransportIndex::TransportIndex(int n_ports) : n_ports_(n_ports) {
  if (n_ports < 2) throw std::invalid_argument("TransportIndex: n_ports < 2");
  for (int i = 1; i <= n_ports; ++i)
    for (int j = i + 1; j <= n_ports; ++j) all_.push_back({i, j});
  on_board_.resize(n_ports + 1);
  rob_.resize(n_ports + 1);
  inbound_.resize(n_ports + 1);
  outbound_.resize(n_ports + 1);
  moved_.resize(n_ports + 1);
  for (int p = 1; p <= n_ports; ++p) {
    for (int t = 0; t < size(); ++t) {
      const auto [i, j] = all_[t];
      if (i <= p && j > p) on_board_[p].push_back(t);
      if (i < p && j > p) rob_[p].push_back(t);
      if (j == p) inbound_[p].push_back(t);
      if (i == p) outbound_[p].push_back(t);
      if (i == p || j == p) moved_[p].push_back(t);
    }
  }
}

int TransportIndex::index_of(int pol, int pod) const {
  for (int t = 0; t < size(); ++t)
    if (all_[t].pol == pol && all_[t].pod == pod) return t;
  throw std::out_of_range("TransportIndex: no transport (" +
                          std::to_string(pol) + "," + std::to_string(pod) + ")");
}

std::vector<CargoClass> cargo_catalog(const VoyageConfig& cfg) {
  std::vector<CargoClass> out;
  int id = 0;
  for (const auto& s : cfg.sizes) {
    for (const auto& w : cfg.weights) {
      for (const auto& c : cfg.customers) {
        CargoClass k;
        k.id = id++;
        k.name = s + "_" + w + "_" + c;
        k.teu = (s == "40ft") ? 2 : 1;
        k.weight = (w == "Heavy") ? 3.0 : (w == "Medium") ? 2.0 : 1.0;
        k.long_term = (c == "Long");
        out.push_back(k);
      }
    }
  }
  return out;
}

double revenue(const Transport& tr, const CargoClass& k, const VoyageConfig& cfg) {
  const double legs = static_cast<double>(tr.pod - tr.pol);
  return k.long_term ? legs * (1.0 - cfg.lr) + cfg.sr : legs + cfg.sr;
}

Eigen::MatrixXd revenue_matrix(const TransportIndex& ti,
                               const std::vector<CargoClass>& classes,
                               const VoyageConfig& cfg) {
  Eigen::MatrixXd rev(ti.size(), classes.size());
  for (int t = 0; t < ti.size(); ++t)
    for (std::size_t k = 0; k < classes.size(); ++k)
      rev(t, static_cast<int>(k)) = revenue(ti.at(t), classes[k], cfg);
  return rev;
}

double longitudinal_position(int b, int n_bays) {
  return (2.0 * (b + 1) - 1.0) / n_bays;
}

double vertical_position(int d, int n_decks) {
  return (2.0 * (d + 1) - 1.0) / n_decks;
}

Geometry location_geometry(const VoyageConfig& cfg) {
  Geometry g;
  const int n = cfg.n_locations();
  g.ld.resize(n);
  g.vd.resize(n);
  for (int b = 0; b < cfg.n_bays; ++b)
    for (int d = 0; d < cfg.n_decks; ++d)
      for (int bl = 0; bl < cfg.n_blocks; ++bl) {
        const int loc = cfg.location_index(b, d, bl);
        g.ld(loc) = longitudinal_position(b, cfg.n_bays);
        g.vd(loc) = vertical_position(d, cfg.n_decks);
      }
  return g;
}

}  // namespace stow
