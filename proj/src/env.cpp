#include "stow/env.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace stow {

PortSchedule port_schedule(int n_ports, int n_classes) {
  PortSchedule s;
  s.leave_step.assign(n_ports + 1, -1);
  s.arrival_step.assign(n_ports + 1, -1);
  const TransportIndex ti(n_ports);
  int t = 0;
  for (int p = 1; p < n_ports; ++p) {
    s.arrival_step[p] = t;
    for (int j = p + 1; j <= n_ports; ++j) {
      const int tr = ti.index_of(p, j);
      for (int k = 0; k < n_classes; ++k) {
        s.steps.push_back({t, p, j, k, tr});
        ++t;
      }
    }
    s.leave_step[p] = t - 1;
  }
  s.t_seq = t;
  return s;
}

int leave_step_closed(int p, int n_ports, int n_classes) {
  return n_classes * (p * (n_ports - 1) - p * (p - 1) / 2) - 1;
}

int arrival_step_closed(int p, int n_ports, int n_classes) {
  return p == 1 ? 0 : leave_step_closed(p - 1, n_ports, n_classes) + 1;
}

double crane_move_target(double total_moves, int n_bays, double delta_cm) {
  return (1.0 + delta_cm) * (2.0 / n_bays) * total_moves;
}

Eigen::VectorXd excess_crane_moves(const Eigen::VectorXd& bay_moves,
                                   double z_bar) {
  const int n = static_cast<int>(bay_moves.size());
  Eigen::VectorXd cm(n - 1);
  for (int b = 0; b + 1 < n; ++b)
    cm(b) = std::max(0.0, bay_moves(b) + bay_moves(b + 1) - z_bar);
  return cm;
}

std::pair<double, Eigen::VectorXd> excess_crane_moves(
    const Eigen::VectorXd& bay_moves, const VoyageConfig& cfg) {
  const double z = crane_move_target(bay_moves.sum(), cfg.n_bays, cfg.delta_cm);
  return {z, excess_crane_moves(bay_moves, z)};
}

Env::Env(const VoyageConfig& cfg)
    : cfg_(cfg),
      ti_(cfg.n_ports),
      classes_(cargo_catalog(cfg)),
      sched_(port_schedule(cfg.n_ports, static_cast<int>(cargo_catalog(cfg).size()))),
      geom_(location_geometry(cfg)),
      n_k_(static_cast<int>(classes_.size())) {
  cfg_.validate();
}

const ScheduleStep& Env::current_step() const {
  if (done_) throw std::logic_error("Env: episode is done");
  return sched_.steps[t_];
}

void Env::reset(const Scenario& sc) {
  const int nt = ti_.size();
  if (sc.q.rows() != nt || sc.q.cols() != n_k_)
    throw std::invalid_argument("Env::reset: scenario shape mismatch");
  sc_ = sc;
  q_rev_ = Eigen::MatrixXd::Zero(nt, n_k_);
  u_on_.assign(static_cast<std::size_t>(cfg_.n_locations()) * nt * n_k_, 0.0);
  u_cum_ = u_on_;
  cap_res_ = Eigen::Map<const Eigen::VectorXd>(cfg_.capacity.data(),
                                               cfg_.n_locations());
  moves_loc_ = Eigen::VectorXd::Zero(cfg_.n_locations());
  loaded_ = Eigen::MatrixXd::Zero(nt, n_k_);
  tw_ = lm_ = vm_ = 0.0;
  t_ = 0;
  port_ = 0;
  done_ = false;
  total_reward_ = 0.0;
  reports_.clear();
  arrive(1);
}

void Env::arrive(int p) {
  port_ = p;
  moves_loc_.setZero();
  // discharge first: cargo bound for p leaves the vessel and frees capacity
  for (int tr : ti_.inbound(p)) {
    for (int loc = 0; loc < cfg_.n_locations(); ++loc) {
      for (int k = 0; k < n_k_; ++k) {
        const double v = u_on_[flat_index(loc, tr, k)];
        if (v == 0.0) continue;
        u_on_[flat_index(loc, tr, k)] = 0.0;
        moves_loc_(loc) += v;
        cap_res_(loc) += classes_[k].teu * v;
        tw_ -= classes_[k].weight * v;
        lm_ -= geom_.ld(loc) * classes_[k].weight * v;
        vm_ -= geom_.vd(loc) * classes_[k].weight * v;
      }
    }
  }
  for (int tr : ti_.outbound(p))
    for (int k = 0; k < n_k_; ++k) q_rev_(tr, k) = sc_.q(tr, k);
}

double Env::residual_demand(int tr, int k) const {
  return std::max(0.0, q_rev_(tr, k) - loaded_(tr, k));
}

double Env::residual_demand_current() const {
  const auto& st = current_step();
  return residual_demand(st.tr, st.k);
}

double Env::onboard(int loc, int tr, int k) const {
  return u_on_[flat_index(loc, tr, k)];
}

double Env::cumulative(int loc, int tr, int k) const {
  return u_cum_[flat_index(loc, tr, k)];
}

Eigen::VectorXd Env::onboard_by_location() const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(cfg_.n_locations());
  for (int loc = 0; loc < cfg_.n_locations(); ++loc)
    for (int tr = 0; tr < ti_.size(); ++tr)
      for (int k = 0; k < n_k_; ++k) v(loc) += u_on_[flat_index(loc, tr, k)];
  return v;
}

CostReport Env::port_costs(int p) const {
  CostReport r;
  r.port = p;
  r.hm = Eigen::MatrixXd::Zero(cfg_.n_bays, cfg_.n_blocks);
  r.ho = Eigen::MatrixXd::Zero(cfg_.n_bays, cfg_.n_blocks);
  const double tol = cfg_.feas_tol;
  for (int b = 0; b < cfg_.n_bays; ++b) {
    for (int bl = 0; bl < cfg_.n_blocks; ++bl) {
      double below_moves = 0.0;
      const int hold = cfg_.location_index(b, 0, bl);
      for (int tr : ti_.moved(p))
        for (int k = 0; k < n_k_; ++k) below_moves += u_cum_[flat_index(hold, tr, k)];
      if (below_moves > tol) {
        r.hm(b, bl) = 1.0;
        double rob_on_deck = 0.0;
        const int deck = cfg_.location_index(b, 1, bl);
        for (int tr : ti_.rob(p))
          for (int k = 0; k < n_k_; ++k) rob_on_deck += u_cum_[flat_index(deck, tr, k)];
        r.ho(b, bl) = rob_on_deck;
      }
    }
  }
  r.ho_total = r.ho.sum();

  double demand_moves = 0.0;
  for (int tr : ti_.moved(p))
    for (int k = 0; k < n_k_; ++k) demand_moves += sc_.q(tr, k);
  r.z_bar = crane_move_target(demand_moves, cfg_.n_bays, cfg_.delta_cm);

  Eigen::VectorXd bay_moves = Eigen::VectorXd::Zero(cfg_.n_bays);
  for (int b = 0; b < cfg_.n_bays; ++b)
    for (int d = 0; d < cfg_.n_decks; ++d)
      for (int bl = 0; bl < cfg_.n_blocks; ++bl)
        bay_moves(b) += moves_loc_(cfg_.location_index(b, d, bl));
  r.pair_moves.resize(cfg_.n_bays - 1);
  for (int b = 0; b + 1 < cfg_.n_bays; ++b)
    r.pair_moves(b) = bay_moves(b) + bay_moves(b + 1);
  r.cm = excess_crane_moves(bay_moves, r.z_bar);
  r.cm_total_pairs = r.cm.sum();
  r.cm_single = r.cm.size() > 0 ? r.cm.maxCoeff() : 0.0;
  return r;
}

StepResult Env::step(const Eigen::VectorXd& x) {
  if (done_) throw std::logic_error("Env::step: episode is done");
  if (x.size() != cfg_.n_locations())
    throw std::invalid_argument("Env::step: action size mismatch");
  for (int i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x(i)))
      throw std::invalid_argument("Env::step: non-finite action entry");
    if (x(i) < 0.0)
      throw std::invalid_argument("Env::step: negative action entry");
  }
  const ScheduleStep st = current_step();
  const CargoClass& kc = classes_[st.k];

  StepResult res;
  res.t = t_;
  const double q_res = residual_demand(st.tr, st.k);
  const double placed = x.sum();
  res.revenue = revenue(ti_.at(st.tr), kc, cfg_) * std::min(placed, q_res);

  for (int loc = 0; loc < cfg_.n_locations(); ++loc) {
    const double v = x(loc);
    if (v == 0.0) continue;
    u_on_[flat_index(loc, st.tr, st.k)] += v;
    u_cum_[flat_index(loc, st.tr, st.k)] += v;
    cap_res_(loc) -= kc.teu * v;
    moves_loc_(loc) += v;
    tw_ += kc.weight * v;
    lm_ += geom_.ld(loc) * kc.weight * v;
    vm_ += geom_.vd(loc) * kc.weight * v;
  }
  loaded_(st.tr, st.k) += placed;

  if (t_ == sched_.leave_step[port_]) {
    CostReport rep = port_costs(port_);
    res.cost_ho = cfg_.ct_ho * rep.ho_total;
    res.cost_cm = cfg_.ct_cm * rep.cm_total_pairs;
    reports_.push_back(std::move(rep));
    if (t_ + 1 < sched_.t_seq) {
      arrive(port_ + 1);
    } else {
      // terminal call: everything discharges, so its crane work is already
      // determined by the plan and belongs to this episode's objective
      arrive(cfg_.n_ports);
      CostReport last = port_costs(cfg_.n_ports);
      res.cost_ho += cfg_.ct_ho * last.ho_total;
      res.cost_cm += cfg_.ct_cm * last.cm_total_pairs;
      reports_.push_back(std::move(last));
      done_ = true;
    }
  }
  res.reward = res.revenue - res.cost_ho - res.cost_cm;
  res.done = done_;
  total_reward_ += res.reward;
  ++t_;
  return res;
}

namespace {

// Shared cost evaluation for audits: reconstruct per-port move counts and
// leave-state utilization from the cumulative plan.
std::vector<CostReport> replay_costs(const VoyageConfig& cfg, const Scenario& sc,
                                     const std::vector<double>& u_cum,
                                     const TransportIndex& ti,
                                     const std::vector<CargoClass>& classes) {
  const int n_k = static_cast<int>(classes.size());
  auto at = [&](int loc, int tr, int k) {
    return u_cum[(static_cast<std::size_t>(loc) * ti.size() + tr) * n_k + k];
  };
  std::vector<CostReport> out;
  for (int p = 1; p <= cfg.n_ports; ++p) {
    CostReport r;
    r.port = p;
    r.hm = Eigen::MatrixXd::Zero(cfg.n_bays, cfg.n_blocks);
    r.ho = Eigen::MatrixXd::Zero(cfg.n_bays, cfg.n_blocks);
    for (int b = 0; b < cfg.n_bays; ++b)
      for (int bl = 0; bl < cfg.n_blocks; ++bl) {
        double below = 0.0;
        const int hold = cfg.location_index(b, 0, bl);
        for (int tr : ti.moved(p))
          for (int k = 0; k < n_k; ++k) below += at(hold, tr, k);
        if (below > cfg.feas_tol) {
          r.hm(b, bl) = 1.0;
          double rob_deck = 0.0;
          const int deck = cfg.location_index(b, 1, bl);
          for (int tr : ti.rob(p))
            for (int k = 0; k < n_k; ++k) rob_deck += at(deck, tr, k);
          r.ho(b, bl) = rob_deck;
        }
      }
    r.ho_total = r.ho.sum();
    double demand_moves = 0.0;
    for (int tr : ti.moved(p))
      for (int k = 0; k < n_k; ++k) demand_moves += sc.q(tr, k);
    r.z_bar = crane_move_target(demand_moves, cfg.n_bays, cfg.delta_cm);
    Eigen::VectorXd bay_moves = Eigen::VectorXd::Zero(cfg.n_bays);
    for (int b = 0; b < cfg.n_bays; ++b)
      for (int d = 0; d < cfg.n_decks; ++d)
        for (int bl = 0; bl < cfg.n_blocks; ++bl) {
          const int loc = cfg.location_index(b, d, bl);
          for (int tr : ti.moved(p))
            for (int k = 0; k < n_k; ++k) bay_moves(b) += at(loc, tr, k);
        }
    r.pair_moves.resize(cfg.n_bays - 1);
    for (int b = 0; b + 1 < cfg.n_bays; ++b)
      r.pair_moves(b) = bay_moves(b) + bay_moves(b + 1);
    r.cm = excess_crane_moves(bay_moves, r.z_bar);
    r.cm_total_pairs = r.cm.sum();
    r.cm_single = r.cm.size() > 0 ? r.cm.maxCoeff() : 0.0;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

AuditReport audit_plan(const VoyageConfig& cfg, const Scenario& sc,
                       const std::vector<double>& u_cum) {
  const TransportIndex ti(cfg.n_ports);
  const auto classes = cargo_catalog(cfg);
  const auto geom = location_geometry(cfg);
  const int n_k = static_cast<int>(classes.size());
  const int n_loc = cfg.n_locations();
  if (u_cum.size() != static_cast<std::size_t>(n_loc) * ti.size() * n_k)
    throw std::invalid_argument("audit_plan: plan size mismatch");
  auto at = [&](int loc, int tr, int k) {
    return u_cum[(static_cast<std::size_t>(loc) * ti.size() + tr) * n_k + k];
  };

  AuditReport rep;
  for (double v : u_cum)
    rep.worst_negative = std::max(rep.worst_negative, -v);

  for (int tr = 0; tr < ti.size(); ++tr)
    for (int k = 0; k < n_k; ++k) {
      double loaded = 0.0;
      for (int loc = 0; loc < n_loc; ++loc) loaded += at(loc, tr, k);
      rep.worst_demand = std::max(rep.worst_demand, loaded - sc.q(tr, k));
      rep.total_revenue +=
          revenue(ti.at(tr), classes[k], cfg) * std::min(loaded, sc.q(tr, k));
    }

  for (int p = 1; p < cfg.n_ports; ++p) {
    for (int loc = 0; loc < n_loc; ++loc) {
      double teu = 0.0;
      for (int tr : ti.on_board(p))
        for (int k = 0; k < n_k; ++k) teu += classes[k].teu * at(loc, tr, k);
      rep.worst_capacity =
          std::max(rep.worst_capacity, teu - cfg.capacity[loc]);
    }
    // single POD per bay-block among the loads made at this port
    for (int b = 0; b < cfg.n_bays; ++b)
      for (int bl = 0; bl < cfg.n_blocks; ++bl) {
        int pods = 0;
        for (int j = p + 1; j <= cfg.n_ports; ++j) {
          double v = 0.0;
          const int tr = ti.index_of(p, j);
          for (int d = 0; d < cfg.n_decks; ++d)
            for (int k = 0; k < n_k; ++k)
              v += at(cfg.location_index(b, d, bl), tr, k);
          if (v > cfg.feas_tol) ++pods;
        }
        if (pods > 1) rep.pbs_violations += pods - 1;
      }
    // stability of the leave state
    double tw = 0, lmom = 0, vmom = 0;
    for (int loc = 0; loc < n_loc; ++loc)
      for (int tr : ti.on_board(p))
        for (int k = 0; k < n_k; ++k) {
          const double w = classes[k].weight * at(loc, tr, k);
          tw += w;
          lmom += geom.ld(loc) * w;
          vmom += geom.vd(loc) * w;
        }
    rep.worst_stability = std::max(rep.worst_stability, cfg.lcg_lb * tw - lmom);
    rep.worst_stability = std::max(rep.worst_stability, lmom - cfg.lcg_ub * tw);
    rep.worst_stability = std::max(rep.worst_stability, cfg.vcg_lb * tw - vmom);
    rep.worst_stability = std::max(rep.worst_stability, vmom - cfg.vcg_ub * tw);
  }

  rep.reports = replay_costs(cfg, sc, u_cum, ti, classes);
  for (const auto& r : rep.reports) {
    rep.total_ho += r.ho_total;
    rep.total_cm_pairs += r.cm_total_pairs;
    rep.total_cm_single += r.cm_single;
  }
  rep.objective_pairs = rep.total_revenue - cfg.ct_ho * rep.total_ho -
                        cfg.ct_cm * rep.total_cm_pairs;
  rep.objective_single = rep.total_revenue - cfg.ct_ho * rep.total_ho -
                         cfg.ct_cm * rep.total_cm_single;
  const double tol = cfg.feas_tol;
  rep.feasible = rep.worst_demand <= tol && rep.worst_capacity <= tol &&
                 rep.worst_stability <= tol && rep.worst_negative <= tol &&
                 rep.pbs_violations == 0;
  return rep;
}

namespace {

nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd vec_from_json(const nlohmann::json& a) {
  Eigen::VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<int>(i)) = a[i];
  return v;
}

}  // namespace

void write_trace_jsonl(const EpisodeTrace& tr, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  nlohmann::json h;
  h["type"] = "header";
  h["version"] = tr.version;
  h["config_digest"] = tr.config_digest;
  h["seed"] = tr.seed;
  h["episode_index"] = tr.episode_index;
  out << h.dump() << "\n";
  for (const auto& s : tr.steps) {
    nlohmann::json j;
    j["type"] = "step";
    j["t"] = s.t;
    j["pol"] = s.pol;
    j["pod"] = s.pod;
    j["k"] = s.k;
    j["x"] = vec_to_json(s.x);
    j["reward"] = s.reward;
    j["revenue"] = s.revenue;
    j["cost_ho"] = s.cost_ho;
    j["cost_cm"] = s.cost_cm;
    out << j.dump() << "\n";
  }
  for (const auto& r : tr.reports) {
    nlohmann::json j;
    j["type"] = "port_costs";
    j["port"] = r.port;
    j["z_bar"] = r.z_bar;
    j["ho_total"] = r.ho_total;
    j["cm_pairs"] = vec_to_json(r.cm);
    j["cm_single"] = r.cm_single;
    out << j.dump() << "\n";
  }
  nlohmann::json q;
  q["type"] = "scenario";
  q["rows"] = tr.q.rows();
  q["cols"] = tr.q.cols();
  nlohmann::json qv = nlohmann::json::array();
  for (int i = 0; i < tr.q.rows(); ++i)
    for (int j = 0; j < tr.q.cols(); ++j) qv.push_back(tr.q(i, j));
  q["q"] = qv;
  out << q.dump() << "\n";
  nlohmann::json s;
  s["type"] = "summary";
  s["total_reward"] = tr.total_reward;
  s["final_plan"] = tr.final_plan;
  out << s.dump() << "\n";
}

EpisodeTrace read_trace_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  EpisodeTrace tr;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    const std::string type = j.at("type");
    if (type == "header") {
      tr.version = j.at("version");
      tr.config_digest = j.at("config_digest");
      tr.seed = j.at("seed");
      tr.episode_index = j.at("episode_index");
    } else if (type == "step") {
      TraceStep s;
      s.t = j.at("t");
      s.pol = j.at("pol");
      s.pod = j.at("pod");
      s.k = j.at("k");
      s.x = vec_from_json(j.at("x"));
      s.reward = j.at("reward");
      s.revenue = j.at("revenue");
      s.cost_ho = j.at("cost_ho");
      s.cost_cm = j.at("cost_cm");
      tr.steps.push_back(std::move(s));
    } else if (type == "port_costs") {
      CostReport r;
      r.port = j.at("port");
      r.z_bar = j.at("z_bar");
      r.ho_total = j.at("ho_total");
      r.cm = vec_from_json(j.at("cm_pairs"));
      r.cm_total_pairs = r.cm.sum();
      r.cm_single = j.at("cm_single");
      tr.reports.push_back(std::move(r));
    } else if (type == "scenario") {
      const int rows = j.at("rows"), cols = j.at("cols");
      tr.q.resize(rows, cols);
      const auto& qv = j.at("q");
      int idx = 0;
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) tr.q(r, c) = qv[idx++];
    } else if (type == "summary") {
      tr.total_reward = j.at("total_reward");
      tr.final_plan = j.at("final_plan").get<std::vector<double>>();
    }
  }
  return tr;
}

}  // namespace stow
