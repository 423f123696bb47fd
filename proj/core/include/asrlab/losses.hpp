#pragma once

#include <Eigen/Dense>
#include <vector>

#include "asrlab/encoder.hpp"

namespace asrlab {

struct Pair {
  int i;
  int j;
  bool same_class;
};

struct PairBatch {
  std::vector<Pair> pairs;
};

struct Triplet {
  int a;
  int p;
  int n;
};

struct TripletBatch {
  std::vector<Triplet> triplets;
};

// Learnable class boundary for the margin loss, updated by plain gradient
// descent and kept positive.
struct MarginState {
  double beta = 0.6;
  double beta_lr = 5e-4;
};

struct LossReport {
  double value = 0.0;
  Eigen::MatrixXd grad_embeddings;
  double grad_beta = 0.0;  // margin loss only
  int active_count = 0;
};

double pairwise_distance(const EmbeddingBatch& emb, int i, int j);

// Mean over pairs of d for same-class and [gamma - d]+ for diff-class.
// Zero subgradient at d = 0 and at the hinge kink.
LossReport contrastive_loss(const EmbeddingBatch& emb, const PairBatch& pairs,
                            double gamma = 1.0);

// Mean over triplets of [d_ap - d_an + gamma]+.
LossReport triplet_loss(const EmbeddingBatch& emb, const TripletBatch& triplets,
                        double gamma = 0.2);

// Sum over pairs of [gamma + (d - beta)]+ for same-class and
// [gamma - (d - beta)]+ for diff-class; mean_reduction divides by the pair
// count instead. grad_beta sums -1/+1 over hinge-active same/diff pairs
// (scaled alike).
LossReport margin_loss(const EmbeddingBatch& emb, const PairBatch& pairs,
                       double gamma, const MarginState& state,
                       bool mean_reduction = false);

// One descent step on beta; result clamped at 1e-3.
void update_beta(MarginState& state, double grad_beta);

}  // namespace asrlab
