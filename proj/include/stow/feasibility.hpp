#ifndef STOW_FEASIBILITY_HPP
#define STOW_FEASIBILITY_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stow/env.hpp"
#include "stow/rng.hpp"

namespace stow {

enum class RowKind { demand, capacity, lcg_lb, lcg_ub, vcg_lb, vcg_ub };

// Linear inequality system A x <= b describing everything a single step's
// allocation must satisfy given the current vessel state: one demand row,
// one TEU row per location, and four bounds keeping the post-step center
// of gravity inside the seaworthiness envelope. Stability rows are soft
// under the convex projection (a port-leave state may be unreachable from
// an already-listing intermediate state).
struct Polyhedron {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  std::vector<RowKind> kind;
  std::vector<char> soft;

  int m() const { return static_cast<int>(A.rows()); }
  int n() const { return static_cast<int>(A.cols()); }
};

// Raw-ingredient builder, used directly by tests.
Polyhedron build_step_polyhedron(double q_residual, int teu_k, double w_k,
                                 const Eigen::VectorXd& residual_capacity,
                                 const Geometry& geom, const VoyageConfig& cfg,
                                 double tw, double lm, double vm);

// Builds the system for the env's current step.
Polyhedron build_polyhedron(const Env& env);

// Positive parts of A x - b, raw row units.
Eigen::VectorXd violation(const Polyhedron& ph, const Eigen::VectorXd& x);
double total_violation(const Polyhedron& ph, const Eigen::VectorXd& x);

struct VpParams {
  double eta = 0.010;
  int epochs = 273;
  double delta_v = 0.024;  // inference early-stop on violation decrease
  bool train_mode = false; // fixed epoch count, no early stop
};

struct VpResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double initial_violation = 0.0;  // on the normalized system
  double final_violation = 0.0;
};

// Violation-projection: gradient descent on half the squared violation norm,
// rows pre-scaled to unit Euclidean norm (raw rows mix container counts with
// TEU sums and stall the descent). x is clamped to the nonnegative orthant
// (and to the mask's support, when given) after every iteration.
VpResult vp_project(const Eigen::VectorXd& x, const Polyhedron& ph,
                    const VpParams& params,
                    const std::optional<Eigen::VectorXd>& mask = std::nullopt);

// Element-wise box clamp.
Eigen::VectorXd clip_box(const Eigen::VectorXd& x, const Eigen::VectorXd& lb,
                         const Eigen::VectorXd& ub);

// Per-location upper bounds for the policy-clipping stage: residual TEU
// capacity divided by the step class's TEU factor.
Eigen::VectorXd capacity_box(const Polyhedron& ph);

struct CpParams {
  double lambda_soft = 1e4;  // l1 penalty rate on stability slack
  double tol = 1e-9;         // KKT residual target
  int max_sweeps = 200000;
};

struct CpResult {
  Eigen::VectorXd x;
  double kkt_residual = 0.0;
  int sweeps = 0;
  bool converged = false;
};

// Euclidean projection onto the step polyhedron: demand, capacity and
// nonnegativity are hard; stability rows carry an l1 slack penalty. Solved
// by cyclic dual coordinate ascent (soft rows have capped multipliers).
// Throws on non-convergence, carrying the final residual in the message.
CpResult cp_project(const Eigen::VectorXd& x, const Polyhedron& ph,
                    const CpParams& params = {},
                    const std::optional<Eigen::VectorXd>& mask = std::nullopt);

// Block-stowage action mask. Keeps the current discharge port's cargo in
// bay-blocks that are either already dedicated to that POD or empty on both
// decks, opening just enough empty bay-blocks (scored randomly, mirrored
// fore/aft) to cover the demand that does not fit in the dedicated ones.
Eigen::VectorXd pbs_mask(const Env& env, Rng& rng);

// Deterministic core with injected scores (n_bays x n_blocks, row-major).
Eigen::VectorXd pbs_mask_scored(const Env& env,
                                const Eigen::VectorXd& raw_scores);

Eigen::VectorXd apply_mask(const Eigen::VectorXd& x,
                           const Eigen::VectorXd& mask);

// Feasibility pipeline: optional mask, then at most one of VP (iterative)
// or CP (exact on hard rows), then optional capacity clipping.
struct PipelineSpec {
  bool use_mask = false;
  enum class Projection { none, vp, cp } projection = Projection::none;
  bool use_pc = false;
  VpParams vp;
  CpParams cp;

  // Accepts "PBS/VP", "PBS/VP/PC", "PBS/CP", "PBS", "VP", "PC", "none",
  // and the early-stop variant "vp-star" (eta 0.01, 300 epochs, delta 0.01).
  static PipelineSpec parse(const std::string& name);
  std::string str() const;
};

struct PipelineResult {
  Eigen::VectorXd x;                    // executable action (nonnegative)
  std::optional<Eigen::VectorXd> mask;
  Polyhedron ph;                        // system the projections used
  double violation_before = 0.0;        // raw-unit totals
  double violation_after = 0.0;
};

// Applies the pipeline to a raw action for the env's current step. Projection
// stages operate on the mask's support so masked-out locations stay at zero.
// `train_mode` selects VP's fixed-epoch variant.
PipelineResult run_pipeline(const Env& env, const PipelineSpec& spec,
                            const Eigen::VectorXd& x_raw, Rng& mask_rng,
                            bool train_mode);

}  // namespace stow

#endif
