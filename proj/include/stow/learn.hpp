#ifndef STOW_LEARN_HPP
#define STOW_LEARN_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stow/env.hpp"
#include "stow/feasibility.hpp"
#include "stow/rng.hpp"

namespace stow {

struct HyperParams {
  double lr = 1.46e-4;
  int batch_size = 64;      // replay transitions consumed per update burst
  int mini_batch = 32;      // SGD chunk within a burst
  double gamma = 0.99;
  double tau_su = 0.005;    // target-network soft-update rate
  double lambda_f = 0.283;  // feasibility-regularization weight
  int buffer_capacity = 10000;
  double max_policy_std = 9.460;
  int hidden_units = 512;
  int actor_layers = 2;     // hidden layers
  int critic_layers = 5;    // hidden layers
  int warmup_steps = 500;   // env steps before updates start
  int train_steps = 20000;  // total env steps
  double validation_frac = 0.2;  // validate every this fraction of budget
  int validation_episodes = 8;
  int inference_rollouts = 5;
  double init_alpha = 0.2;
  double adam_beta1 = 0.9, adam_beta2 = 0.999, adam_eps = 1e-8;
};

// Plain fully connected net, tanh hidden activations, linear output.
// Gradients are hand-written reverse passes checked against finite
// differences; tanh keeps the loss surface kink-free for those checks.
struct Mlp {
  std::vector<Eigen::MatrixXd> W;
  std::vector<Eigen::VectorXd> b;

  static Mlp make(const std::vector<int>& dims, Rng& rng);
  static Mlp zeros_like(const Mlp& other);

  int n_layers() const { return static_cast<int>(W.size()); }
  int in_dim() const { return static_cast<int>(W.front().cols()); }
  int out_dim() const { return static_cast<int>(W.back().rows()); }
  std::size_t n_params() const;

  struct Cache {
    std::vector<Eigen::VectorXd> acts;  // acts[0] = input, post-activation
    std::vector<Eigen::VectorXd> pre;   // pre-activations per layer
  };
  Eigen::VectorXd forward(const Eigen::VectorXd& x, Cache* cache) const;
  // accumulates parameter gradients into `grad`; optionally returns dL/dinput
  void backward(const Cache& cache, const Eigen::VectorXd& dout, Mlp& grad,
                Eigen::VectorXd* dinput) const;

  void add_scaled(const Mlp& other, double s);
  void scale(double s);
  std::vector<double*> param_ptrs();        // flattened view for FD checks
  std::vector<const double*> param_ptrs() const;
};

// Gaussian policy head: strictly positive mean via softplus, bounded
// positive std via max_policy_std * logistic.
struct Actor {
  Mlp net;  // output dim = 2 * n_actions
  double max_std = 9.460;

  int n_actions() const { return net.out_dim() / 2; }
  struct Cache {
    Mlp::Cache net_cache;
    Eigen::VectorXd mu, sigma, z;
  };
  void forward(const Eigen::VectorXd& obs, Cache& cache) const;
  void backward(const Cache& cache, const Eigen::VectorXd& dmu,
                const Eigen::VectorXd& dsigma, Mlp& grad) const;
};

struct ActorSample {
  Eigen::VectorXd raw;   // mu + sigma .* xi, before rectification
  Eigen::VectorXd exec;  // rectified (and masked) action for the env
  Eigen::VectorXd xi;
  double log_prob = 0.0;  // Gaussian at the raw point, masked coords skipped
};

ActorSample policy_sample(const Eigen::VectorXd& mu,
                          const Eigen::VectorXd& sigma, Rng& rng,
                          const std::optional<Eigen::VectorXd>& mask);
double gaussian_log_prob(const Eigen::VectorXd& raw, const Eigen::VectorXd& mu,
                         const Eigen::VectorXd& sigma,
                         const std::optional<Eigen::VectorXd>& mask);

// Observation layout: onboard utilization, revealed demand, reported demand
// mean and std (all scaled to O(1)), one-hot current cargo group, episode
// progress. Dimension: n_u + 4*n_q + 1.
Eigen::VectorXd observe(const Env& env);
int observation_dim(const VoyageConfig& cfg);

// Mean over polyhedron rows of the positive residual.
double fr_loss(const Eigen::VectorXd& x, const Polyhedron& ph);
Eigen::VectorXd fr_loss_grad(const Eigen::VectorXd& x, const Polyhedron& ph);

struct Transition {
  Eigen::VectorXd s, x, s_next;
  double r = 0.0;
  bool done = false;
  Eigen::VectorXd mask, mask_next;
  Eigen::MatrixXd A;  // step polyhedron at s, for the regularizer
  Eigen::VectorXd b;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity) : capacity_(capacity) {}
  void add(Transition tr);
  int size() const { return static_cast<int>(data_.size()); }
  const Transition& sample_one(Rng& rng) const;

 private:
  int capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> data_;
};

struct SacModel {
  Actor actor;
  Mlp critic1, critic2, target1, target2;
  double log_alpha = 0.0;
  double gamma = 0.99;
  double lambda_f = 0.283;
  double entropy_target = 0.0;  // set to -n_actions

  static SacModel make(int obs_dim, int act_dim, const HyperParams& hp,
                       Rng& rng);
};

struct SacGrads {
  Mlp actor, critic1, critic2;
  double log_alpha = 0.0;
};

struct SacLosses {
  double critic1 = 0.0, critic2 = 0.0, actor = 0.0, alpha = 0.0;
};

struct SacNoise {
  // one row per batch element
  Eigen::MatrixXd xi_target;
  Eigen::MatrixXd xi_actor;
};

// Pure loss/gradient evaluation with injected noise so finite-difference
// checks can re-evaluate at perturbed parameters. Targets in the critic
// regression are treated as constants (no gradient flows through them).
SacLosses sac_losses(const SacModel& model,
                     const std::vector<const Transition*>& batch,
                     const SacNoise& noise, SacGrads* grads);

struct AdamState {
  Mlp m, v;
  double m_alpha = 0.0, v_alpha = 0.0;
  long t = 0;
};

void adam_step(Mlp& params, const Mlp& grad, AdamState& st, Mlp& m, Mlp& v,
               const HyperParams& hp);

// One SAC update on `mini_batch`-sized chunks drawn from the buffer.
struct Learner {
  HyperParams hp;
  SacModel model;
  AdamState adam_actor, adam_c1, adam_c2;
  long alpha_t = 0;

  Learner(int obs_dim, int act_dim, const HyperParams& hp, Rng& rng);
  void update(const ReplayBuffer& buffer, Rng& rng);
  void soft_update_targets();
};

// Rollout policies ------------------------------------------------------

// Raw action proposal for the env's current step; the pipeline makes it
// executable.
using PolicyFn =
    std::function<Eigen::VectorXd(const Env&, const Eigen::VectorXd& obs, Rng&)>;

PolicyFn net_policy(const Actor& actor, bool stochastic);
PolicyFn random_policy();   // uniform per location, demand-row safe scale
PolicyFn greedy_policy();   // saturate demand or capacity, spread by space

struct EvalRow {
  std::uint64_t base_seed = 0;
  int episode_index = 0;
  double objective = 0.0;
  bool feasible = false;
  int n_rollouts = 0;
  int best_rollout = -1;
  double seconds = 0.0;
};

struct EvalSummary {
  double objective_mean = 0.0;
  double feasible_pct = 0.0;
  double seconds_mean = 0.0;
  int n_instances = 0;
};

struct EvalResult {
  std::vector<EvalRow> rows;
  EvalSummary summary;
};

// Runs n_rollouts stochastic episodes per instance through the pipeline and
// keeps the best audit-feasible one (best objective overall if none pass).
EvalResult evaluate(const PolicyFn& policy, const VoyageConfig& cfg,
                    std::uint64_t base_seed, int n_instances,
                    const PipelineSpec& pipeline, int n_rollouts,
                    int n_threads = 1);

struct TrainCurvePoint {
  int step = 0;
  double val_objective = 0.0;
  double val_feasible_pct = 0.0;
};

struct TrainResult {
  SacModel best;
  SacModel final_model;
  std::vector<TrainCurvePoint> curve;
  double best_val_objective = 0.0;
  int env_steps = 0;
};

TrainResult train(const VoyageConfig& cfg, const HyperParams& hp,
                  const PipelineSpec& train_pipeline,
                  const PipelineSpec& val_pipeline, std::uint64_t seed);

// Checkpoints ------------------------------------------------------------

void save_checkpoint(const std::string& path, const SacModel& model,
                     const HyperParams& hp, const VoyageConfig& cfg);
// Verifies tool version, config digest and architecture before loading.
SacModel load_checkpoint(const std::string& path, const VoyageConfig& cfg,
                         HyperParams* hp_out = nullptr);

}  // namespace stow

#endif
