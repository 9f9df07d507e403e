#ifndef STOW_ENV_HPP
#define STOW_ENV_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stow/config.hpp"
#include "stow/core.hpp"
#include "stow/instances.hpp"

namespace stow {

// One loading decision: place containers of class k for transport
// (pol, pod) across the vessel's locations.
struct ScheduleStep {
  int t = 0;
  int pol = 0;
  int pod = 0;
  int k = 0;
  int tr = 0;  // transport index of (pol, pod)
};

// Episode step layout: steps grouped by load port ascending, within a port
// ordered by discharge port then class. leave_step[p] is the last step index
// taken at port p; arrival_step[p] the first (demand for p is revealed there).
struct PortSchedule {
  std::vector<ScheduleStep> steps;
  std::vector<int> leave_step;    // indexed by port 1..n_ports-1; else -1
  std::vector<int> arrival_step;  // indexed by port 1..n_ports-1; else -1
  int t_seq = 0;
};

PortSchedule port_schedule(int n_ports, int n_classes);

// Closed forms for the schedule landmarks (0-based step indices).
int leave_step_closed(int p, int n_ports, int n_classes);
int arrival_step_closed(int p, int n_ports, int n_classes);

// Port-call cost evaluation: which hatches had to open (hm), how many
// on-deck containers that forced to restow (ho), and how far each adjacent
// bay pair exceeded the even crane-split target z_bar (cm).
struct CostReport {
  int port = 0;
  Eigen::MatrixXd hm;          // n_bays x n_blocks, 0/1
  Eigen::MatrixXd ho;          // n_bays x n_blocks
  double ho_total = 0.0;
  double z_bar = 0.0;
  Eigen::VectorXd pair_moves;  // moves handled by each adjacent bay pair
  Eigen::VectorXd cm;          // per-pair excess over z_bar
  double cm_total_pairs = 0.0; // sum over pairs (reward convention)
  double cm_single = 0.0;      // max over pairs (planning-model convention)
};

// Crane-move target for a port handling total_moves containers: an even
// two-bay share of the work, stretched by the tolerance delta_cm.
double crane_move_target(double total_moves, int n_bays, double delta_cm);

// Per-pair excess given per-bay move counts and an explicit target.
Eigen::VectorXd excess_crane_moves(const Eigen::VectorXd& bay_moves,
                                   double z_bar);
// Overload that derives the target from the supplied moves themselves.
std::pair<double, Eigen::VectorXd> excess_crane_moves(
    const Eigen::VectorXd& bay_moves, const VoyageConfig& cfg);

struct StepResult {
  double reward = 0.0;
  double revenue = 0.0;
  double cost_ho = 0.0;
  double cost_cm = 0.0;
  bool done = false;
  int t = 0;
};

// Decomposed loading environment. Each episode walks the schedule; the
// action is a per-location allocation for the current step's cargo group.
//
// Two utilization views are maintained: `onboard` drops cargo at its
// discharge port (capacity and stability read this), `cumulative` keeps
// every load ever made (move counts at a port need the discharged cargo as
// well, matching the planning model's static variables).
class Env {
 public:
  explicit Env(const VoyageConfig& cfg);

  const VoyageConfig& config() const { return cfg_; }
  const TransportIndex& transports() const { return ti_; }
  const std::vector<CargoClass>& classes() const { return classes_; }
  const PortSchedule& schedule() const { return sched_; }
  const Geometry& geometry() const { return geom_; }
  int n_locations() const { return cfg_.n_locations(); }

  void reset(const Scenario& sc);
  StepResult step(const Eigen::VectorXd& x);

  bool done() const { return done_; }
  int t() const { return t_; }
  int current_port() const { return port_; }
  const ScheduleStep& current_step() const;
  const Scenario& scenario() const { return sc_; }

  // demand matrix masked to the rows revealed so far
  const Eigen::MatrixXd& q_revealed() const { return q_rev_; }
  bool port_revealed(int p) const { return p <= port_; }
  double residual_demand(int tr, int k) const;
  double residual_demand_current() const;  // for the current step target

  const Eigen::VectorXd& residual_capacity() const { return cap_res_; }
  double onboard(int loc, int tr, int k) const;
  double cumulative(int loc, int tr, int k) const;
  Eigen::VectorXd onboard_by_location() const;  // container counts per loc

  // weight aggregates of the onboard cargo
  double total_weight() const { return tw_; }
  double longitudinal_moment() const { return lm_; }
  double vertical_moment() const { return vm_; }

  double total_reward() const { return total_reward_; }
  const std::vector<CostReport>& cost_reports() const { return reports_; }

  const std::vector<double>& cumulative_plan() const { return u_cum_; }
  const std::vector<double>& onboard_plan() const { return u_on_; }
  int flat_index(int loc, int tr, int k) const {
    return (loc * ti_.size() + tr) * n_k_ + k;
  }

 private:
  void arrive(int p);  // discharge inbound cargo, reveal demand
  CostReport port_costs(int p) const;

  VoyageConfig cfg_;
  TransportIndex ti_;
  std::vector<CargoClass> classes_;
  PortSchedule sched_;
  Geometry geom_;
  int n_k_ = 0;

  Scenario sc_;
  Eigen::MatrixXd q_rev_;
  std::vector<double> u_on_, u_cum_;
  Eigen::VectorXd cap_res_;
  Eigen::VectorXd moves_loc_;  // containers handled at the current port
  Eigen::MatrixXd loaded_;     // |TR| x |K| totals loaded so far
  double tw_ = 0, lm_ = 0, vm_ = 0;
  int t_ = 0;
  int port_ = 1;
  bool done_ = true;
  double total_reward_ = 0.0;
  std::vector<CostReport> reports_;
};

// Whole-plan feasibility audit against the realized scenario. The plan is
// the cumulative tensor (loads of transport tr happen at port pol(tr), so
// per-port loads are recoverable from it).
struct AuditReport {
  bool feasible = false;
  double worst_demand = 0.0;     // max positive residual violation
  double worst_capacity = 0.0;
  double worst_stability = 0.0;
  double worst_negative = 0.0;   // most negative plan entry, as a magnitude
  int pbs_violations = 0;        // bay-blocks loaded for two PODs at a port
  double total_revenue = 0.0;
  double total_ho = 0.0;
  double total_cm_pairs = 0.0;
  double total_cm_single = 0.0;
  double objective_pairs = 0.0;   // revenue - costs, per-pair cm convention
  double objective_single = 0.0;  // revenue - costs, single-max cm convention
  std::vector<CostReport> reports;
};

AuditReport audit_plan(const VoyageConfig& cfg, const Scenario& sc,
                       const std::vector<double>& u_cum);

// Episode trace: JSON-lines, one record per step plus header/cost/summary
// records; self-contained for audit (carries the realized demand).
struct TraceStep {
  int t = 0, pol = 0, pod = 0, k = 0;
  Eigen::VectorXd x;
  double reward = 0, revenue = 0, cost_ho = 0, cost_cm = 0;
};

struct EpisodeTrace {
  std::string version;
  std::string config_digest;
  std::uint64_t seed = 0;
  int episode_index = 0;
  std::vector<TraceStep> steps;
  std::vector<CostReport> reports;
  Eigen::MatrixXd q;
  std::vector<double> final_plan;
  double total_reward = 0.0;
};

void write_trace_jsonl(const EpisodeTrace& tr, const std::string& path);
EpisodeTrace read_trace_jsonl(const std::string& path);

}  // namespace stow

#endif
