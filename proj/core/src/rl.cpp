#include "asrlab/rl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "asrlab/random.hpp"

namespace asrlab {
namespace {

void fill_glorot(Eigen::MatrixXd& W, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(W.rows() + W.cols()));
  std::uniform_real_distribution<double> unif(-bound, bound);
  for (Eigen::Index i = 0; i < W.rows(); ++i)
    for (Eigen::Index j = 0; j < W.cols(); ++j) W(i, j) = unif(rng);
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  Eigen::VectorXd shifted = logits.array() - logits.maxCoeff();
  Eigen::VectorXd e = shifted.array().exp();
  return e / e.sum();
}

struct PolicyGrads {
  Eigen::MatrixXd V1;
  Eigen::VectorXd c1;
  Eigen::MatrixXd V2;
  Eigen::VectorXd c2;
};

// Mean over transitions of coeff_t * grad log pi(a_t | s_t).
PolicyGrads logprob_gradient(const PolicyParams& params,
                             const std::vector<Transition>& transitions,
                             const std::vector<double>& coeffs) {
  PolicyGrads g;
  g.V1 = Eigen::MatrixXd::Zero(params.V1.rows(), params.V1.cols());
  g.c1 = Eigen::VectorXd::Zero(params.c1.size());
  g.V2 = Eigen::MatrixXd::Zero(params.V2.rows(), params.V2.cols());
  g.c2 = Eigen::VectorXd::Zero(params.c2.size());
  const double inv_t = 1.0 / static_cast<double>(transitions.size());
  for (std::size_t t = 0; t < transitions.size(); ++t) {
    if (coeffs[t] == 0.0) continue;
    const Eigen::VectorXd& s = transitions[t].state;
    const Eigen::VectorXd pre = params.V1 * s + params.c1;
    const Eigen::VectorXd h = pre.cwiseMax(0.0);
    const Eigen::VectorXd probs = softmax(params.V2 * h + params.c2);
    Eigen::VectorXd grad_logits = -probs;
    grad_logits(transitions[t].action.code) += 1.0;
    grad_logits *= coeffs[t] * inv_t;
    g.V2 += grad_logits * h.transpose();
    g.c2 += grad_logits;
    Eigen::VectorXd grad_h = params.V2.transpose() * grad_logits;
    grad_h = grad_h.cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
    g.V1 += grad_h * s.transpose();
    g.c1 += grad_h;
  }
  if (!g.V1.allFinite() || !g.c1.allFinite() || !g.V2.allFinite() || !g.c2.allFinite())
    throw std::invalid_argument("policy update: non-finite gradient");
  return g;
}

void ascend(PolicyParams& params, const PolicyGrads& g, double lr) {
  params.V1 += lr * g.V1;
  params.c1 += lr * g.c1;
  params.V2 += lr * g.V2;
  params.c2 += lr * g.c2;
}

std::vector<double> advantages(const TrajectoryBuffer& buffer, const PolicyConfig& cfg) {
  std::vector<double> rewards;
  rewards.reserve(buffer.transitions.size());
  for (const Transition& t : buffer.transitions) rewards.push_back(t.reward);
  std::vector<double> returns = discounted_returns(rewards, buffer.eta);
  if (cfg.baseline) {
    double mean = 0.0;
    for (double g : returns) mean += g;
    mean /= static_cast<double>(returns.size());
    for (double& g : returns) g -= mean;
  }
  return returns;
}

}  // namespace

PolicyParams init_policy(int state_dim, int hidden_dim, int action_dim,
                         std::uint64_t seed) {
  if (state_dim < 1 || hidden_dim < 1 || action_dim < 2)
    throw std::invalid_argument("init_policy: bad dimensions");
  std::mt19937_64 rng(seed);
  PolicyParams p;
  p.V1.resize(hidden_dim, state_dim);
  p.V2.resize(action_dim, hidden_dim);
  fill_glorot(p.V1, rng);
  fill_glorot(p.V2, rng);
  p.c1 = Eigen::VectorXd::Zero(hidden_dim);
  p.c2 = Eigen::VectorXd::Zero(action_dim);
  return p;
}

Eigen::VectorXd policy_forward(const PolicyParams& params, const Eigen::VectorXd& s) {
  if (s.size() != params.V1.cols())
    throw std::invalid_argument("policy_forward: state dimension mismatch");
  const Eigen::VectorXd h = (params.V1 * s + params.c1).cwiseMax(0.0);
  return softmax(params.V2 * h + params.c2);
}

std::pair<ActionId, double> sample_action(const Eigen::VectorXd& probs,
                                          std::mt19937_64& rng) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (probs(i) < 0.0) throw std::invalid_argument("sample_action: negative probability");
    total += probs(i);
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("sample_action: probabilities must sum to 1");
  const double target = uniform01(rng);
  double acc = 0.0;
  Eigen::Index pick = probs.size() - 1;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    acc += probs(i);
    if (acc >= target && probs(i) > 0.0) {
      pick = i;
      break;
    }
  }
  return {ActionId{static_cast<int>(pick)}, std::log(probs(pick))};
}

std::vector<double> discounted_returns(const std::vector<double>& rewards, double eta) {
  if (eta <= 0.0 || eta > 1.0)
    throw std::invalid_argument("discounted_returns: eta must lie in (0, 1]");
  std::vector<double> returns(rewards.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    acc = rewards[i] + eta * acc;
    returns[i] = acc;
  }
  return returns;
}

void reinforce_update(PolicyParams& params, const TrajectoryBuffer& buffer,
                      const PolicyConfig& cfg) {
  if (buffer.transitions.empty())
    throw std::invalid_argument("reinforce_update: empty buffer");
  const std::vector<double> adv = advantages(buffer, cfg);
  ascend(params, logprob_gradient(params, buffer.transitions, adv), cfg.lr);
}

void ppo_update(PolicyParams& params, PolicyParams& old_params,
                const TrajectoryBuffer& buffer, const PolicyConfig& cfg,
                bool sync_old) {
  if (buffer.transitions.empty())
    throw std::invalid_argument("ppo_update: empty buffer");
  for (const Transition& t : buffer.transitions)
    if (!std::isfinite(t.logp_old) || t.logp_old > 0.0)
      throw std::invalid_argument("ppo_update: transition missing a valid logp_old");
  const std::vector<double> adv = advantages(buffer, cfg);
  const double eps = cfg.clip_epsilon;

  for (int epoch = 0; epoch < cfg.ppo_epochs; ++epoch) {
    std::vector<double> coeffs(buffer.transitions.size(), 0.0);
    for (std::size_t t = 0; t < buffer.transitions.size(); ++t) {
      const Transition& tr = buffer.transitions[t];
      const Eigen::VectorXd probs = policy_forward(params, tr.state);
      const double logp_new = std::log(probs(tr.action.code));
      const double rho = std::exp(logp_new - tr.logp_old);
      const double clipped = std::clamp(rho, 1.0 - eps, 1.0 + eps);
      // min picks the unclipped branch when rho*A <= clip(rho)*A; only that
      // branch depends on theta
      coeffs[t] = rho * adv[t] <= clipped * adv[t] ? adv[t] * rho : 0.0;
    }
    ascend(params, logprob_gradient(params, buffer.transitions, coeffs), cfg.lr);
  }
  if (sync_old) old_params = params;
}

std::vector<Eigen::VectorXd> run_softmax_bandit(const std::vector<double>& action_rewards,
                                                const std::vector<double>& init_logits,
                                                int steps, double lr) {
  if (action_rewards.size() != init_logits.size() || action_rewards.size() < 2)
    throw std::invalid_argument("run_softmax_bandit: need matching lists of length >= 2");
  if (steps < 1) throw std::invalid_argument("run_softmax_bandit: steps must be >= 1");
  const Eigen::Index A = static_cast<Eigen::Index>(action_rewards.size());
  Eigen::VectorXd r(A), u(A);
  for (Eigen::Index i = 0; i < A; ++i) {
    r(i) = action_rewards[static_cast<std::size_t>(i)];
    u(i) = init_logits[static_cast<std::size_t>(i)];
  }
  std::vector<Eigen::VectorXd> trajectory;
  trajectory.reserve(static_cast<std::size_t>(steps) + 1);
  for (int t = 0; t < steps; ++t) {
    const Eigen::VectorXd p = softmax(u);
    trajectory.push_back(p);
    const double value = p.dot(r);
    u += lr * (p.array() * (r.array() - value)).matrix();
  }
  trajectory.push_back(softmax(u));
  return trajectory;
}

}  // namespace asrlab
