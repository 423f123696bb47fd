#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "asrlab/encoder.hpp"

namespace asrlab {

struct MetricReport {
  std::map<int, double> recall;  // k -> value
  double nmi = 0.0;
  double f1 = 0.0;
  double weighted = 0.0;
};

struct ClusterAssignment {
  std::vector<int> cluster;
  double inertia = 0.0;
};

// Fraction of queries whose k nearest other rows (Euclidean, ties broken by
// lower index) contain at least one row with the query's label.
std::map<int, double> recall_at_k(const EmbeddingBatch& emb,
                                  const std::vector<int>& labels,
                                  const std::vector<int>& ks);

// Lloyd's algorithm with k-means++ seeding; stops when every centroid moves
// less than 1e-6 or after 100 iterations. Empty clusters are re-seeded from
// the point farthest from its centroid.
ClusterAssignment kmeans(const EmbeddingBatch& emb, int k, std::uint64_t seed);

// 2 I(C;L) / (H(C) + H(L)) with natural logs; 1.0 when both entropies are
// zero, 0.0 when exactly one is.
double nmi(const ClusterAssignment& assign, const std::vector<int>& labels);

// F1 over unordered pairs: predicted-positive = same cluster,
// actually-positive = same label; 0.0 when precision + recall = 0.
double pairwise_f1(const ClusterAssignment& assign, const std::vector<int>& labels);

// Dot product of weights with named metric values. Known names: recall@1,
// recall@2, recall@4, recall@8, nmi, f1. Weights must be non-negative and sum
// to 1 within 1e-9.
double weighted_metric(const MetricReport& report,
                       const std::map<std::string, double>& weights);

inline std::map<std::string, double> default_metric_weights() {
  return {{"recall@1", 0.5}, {"nmi", 0.5}};
}

// Full evaluation: recall at ks, k-means with k = label classes, NMI, F1,
// and the weighted aggregate.
MetricReport evaluate_embeddings(const EmbeddingBatch& emb,
                                 const std::vector<int>& labels,
                                 const std::vector<int>& ks,
                                 const std::map<std::string, double>& weights,
                                 std::uint64_t kmeans_seed);

}  // namespace asrlab
