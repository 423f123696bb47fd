#include "asrlab/losses.hpp"

#include <algorithm>
#include <stdexcept>

namespace asrlab {
namespace {

void check_index(const EmbeddingBatch& emb, int i, const char* what) {
  if (i < 0 || i >= emb.embeddings.rows())
    throw std::invalid_argument(std::string(what) + ": index out of range");
}

// d = |x_i - x_j|; unit vector along the gradient, zero at d = 0.
Eigen::RowVectorXd distance_direction(const EmbeddingBatch& emb, int i, int j,
                                      double d) {
  if (d == 0.0) return Eigen::RowVectorXd::Zero(emb.embeddings.cols());
  return (emb.embeddings.row(i) - emb.embeddings.row(j)) / d;
}

}  // namespace

double pairwise_distance(const EmbeddingBatch& emb, int i, int j) {
  check_index(emb, i, "pairwise_distance");
  check_index(emb, j, "pairwise_distance");
  return (emb.embeddings.row(i) - emb.embeddings.row(j)).norm();
}

LossReport contrastive_loss(const EmbeddingBatch& emb, const PairBatch& pairs,
                            double gamma) {
  if (gamma <= 0.0) throw std::invalid_argument("contrastive_loss: gamma must be positive");
  if (pairs.pairs.empty()) throw std::invalid_argument("contrastive_loss: empty pair list");
  LossReport report;
  report.grad_embeddings =
      Eigen::MatrixXd::Zero(emb.embeddings.rows(), emb.embeddings.cols());
  const double scale = 1.0 / static_cast<double>(pairs.pairs.size());
  for (const Pair& p : pairs.pairs) {
    const double d = pairwise_distance(emb, p.i, p.j);
    if (p.same_class) {
      report.value += scale * d;
      if (d > 0.0) {
        const Eigen::RowVectorXd u = distance_direction(emb, p.i, p.j, d);
        report.grad_embeddings.row(p.i) += scale * u;
        report.grad_embeddings.row(p.j) -= scale * u;
        ++report.active_count;
      }
    } else if (gamma - d > 0.0) {
      report.value += scale * (gamma - d);
      const Eigen::RowVectorXd u = distance_direction(emb, p.i, p.j, d);
      report.grad_embeddings.row(p.i) -= scale * u;
      report.grad_embeddings.row(p.j) += scale * u;
      ++report.active_count;
    }
  }
  return report;
}

LossReport triplet_loss(const EmbeddingBatch& emb, const TripletBatch& triplets,
                        double gamma) {
  if (gamma <= 0.0) throw std::invalid_argument("triplet_loss: gamma must be positive");
  if (triplets.triplets.empty())
    throw std::invalid_argument("triplet_loss: empty triplet list");
  LossReport report;
  report.grad_embeddings =
      Eigen::MatrixXd::Zero(emb.embeddings.rows(), emb.embeddings.cols());
  const double scale = 1.0 / static_cast<double>(triplets.triplets.size());
  for (const Triplet& t : triplets.triplets) {
    const double d_ap = pairwise_distance(emb, t.a, t.p);
    const double d_an = pairwise_distance(emb, t.a, t.n);
    const double term = d_ap - d_an + gamma;
    if (term > 0.0) {
      report.value += scale * term;
      const Eigen::RowVectorXd u_ap = distance_direction(emb, t.a, t.p, d_ap);
      const Eigen::RowVectorXd u_an = distance_direction(emb, t.a, t.n, d_an);
      report.grad_embeddings.row(t.a) += scale * (u_ap - u_an);
      report.grad_embeddings.row(t.p) -= scale * u_ap;
      report.grad_embeddings.row(t.n) += scale * u_an;
      ++report.active_count;
    }
  }
  return report;
}

LossReport margin_loss(const EmbeddingBatch& emb, const PairBatch& pairs,
                       double gamma, const MarginState& state,
                       bool mean_reduction) {
  if (gamma <= 0.0) throw std::invalid_argument("margin_loss: gamma must be positive");
  if (state.beta <= 0.0) throw std::invalid_argument("margin_loss: beta must be positive");
  if (pairs.pairs.empty()) throw std::invalid_argument("margin_loss: empty pair list");
  LossReport report;
  report.grad_embeddings =
      Eigen::MatrixXd::Zero(emb.embeddings.rows(), emb.embeddings.cols());
  const double scale =
      mean_reduction ? 1.0 / static_cast<double>(pairs.pairs.size()) : 1.0;
  for (const Pair& p : pairs.pairs) {
    const double d = pairwise_distance(emb, p.i, p.j);
    const double sign = p.same_class ? 1.0 : -1.0;
    const double term = gamma + sign * (d - state.beta);
    if (term > 0.0) {
      report.value += scale * term;
      report.grad_beta -= scale * sign;
      const Eigen::RowVectorXd u = distance_direction(emb, p.i, p.j, d);
      report.grad_embeddings.row(p.i) += scale * sign * u;
      report.grad_embeddings.row(p.j) -= scale * sign * u;
      ++report.active_count;
    }
  }
  return report;
}

void update_beta(MarginState& state, double grad_beta) {
  state.beta = std::max(state.beta - state.beta_lr * grad_beta, 1e-3);
}

}  // namespace asrlab
