#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "asrlab/samplers.hpp"

namespace asrlab {

// Two-layer ReLU MLP producing logits over the 2B+1 adjustment actions.
struct PolicyParams {
  Eigen::MatrixXd V1;  // H_pol x S_dim
  Eigen::VectorXd c1;
  Eigen::MatrixXd V2;  // A_dim x H_pol
  Eigen::VectorXd c2;

  int state_dim() const { return static_cast<int>(V1.cols()); }
  int hidden_dim() const { return static_cast<int>(V1.rows()); }
  int action_dim() const { return static_cast<int>(V2.rows()); }
};

PolicyParams init_policy(int state_dim, int hidden_dim, int action_dim,
                         std::uint64_t seed);

struct Transition {
  Eigen::VectorXd state;
  ActionId action;
  double logp_old = std::numeric_limits<double>::quiet_NaN();
  double reward = 0.0;
};

struct TrajectoryBuffer {
  std::vector<Transition> transitions;
  double eta = 0.95;
};

struct PolicyConfig {
  double lr = 3e-3;
  double clip_epsilon = 0.2;
  int ppo_epochs = 4;
  double eta = 0.95;
  bool baseline = true;        // subtract the episode mean of returns
  int old_sync_interval = 1;   // ppo_update calls between old-policy syncs
};

// softmax(V2 relu(V1 s + c1) + c2)
Eigen::VectorXd policy_forward(const PolicyParams& params, const Eigen::VectorXd& s);

// Categorical draw; returns the action and log(probs[action]).
std::pair<ActionId, double> sample_action(const Eigen::VectorXd& probs,
                                          std::mt19937_64& rng);

// G_t = sum_{t' >= t} eta^(t'-t) r_t'
std::vector<double> discounted_returns(const std::vector<double>& rewards, double eta);

// One gradient-ascent step on (1/T) sum_t log pi(a_t|s_t) A_t, where
// A_t subtracts the episode mean of returns when cfg.baseline is set.
void reinforce_update(PolicyParams& params, const TrajectoryBuffer& buffer,
                      const PolicyConfig& cfg);

// cfg.ppo_epochs ascent steps on the clipped surrogate
// (1/T) sum_t min(rho_t A_t, clip(rho_t, 1-eps, 1+eps) A_t), with
// rho_t = exp(log pi(a_t|s_t) - logp_old). When sync_old is set, old_params
// becomes a copy of params afterwards.
void ppo_update(PolicyParams& params, PolicyParams& old_params,
                const TrajectoryBuffer& buffer, const PolicyConfig& cfg,
                bool sync_old = true);

// Exact-gradient policy ascent on a one-state MDP: p = softmax(u),
// u += lr * p (r - p.r). Returns steps+1 probability vectors, the initial
// point first.
std::vector<Eigen::VectorXd> run_softmax_bandit(const std::vector<double>& action_rewards,
                                                const std::vector<double>& init_logits,
                                                int steps, double lr);

}  // namespace asrlab
