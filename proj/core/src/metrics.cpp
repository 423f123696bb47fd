#include "asrlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "asrlab/random.hpp"

namespace asrlab {
namespace {

double sq_dist(const Eigen::MatrixXd& X, Eigen::Index i, Eigen::Index j) {
  return (X.row(i) - X.row(j)).squaredNorm();
}

void check_labels(std::size_t n, const std::vector<int>& labels, const char* what) {
  if (labels.size() != n)
    throw std::invalid_argument(std::string(what) + ": label count mismatch");
}

double entropy(const std::vector<long>& counts, long total) {
  double h = 0.0;
  for (long c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

std::map<int, double> recall_at_k(const EmbeddingBatch& emb,
                                  const std::vector<int>& labels,
                                  const std::vector<int>& ks) {
  const Eigen::Index N = emb.embeddings.rows();
  check_labels(static_cast<std::size_t>(N), labels, "recall_at_k");
  if (ks.empty()) throw std::invalid_argument("recall_at_k: no k values");
  for (int k : ks)
    if (k < 1 || k >= N)
      throw std::invalid_argument("recall_at_k: k must satisfy 1 <= k < N");

  std::map<int, double> result;
  for (int k : ks) result[k] = 0.0;

  std::vector<std::pair<double, int>> neighbors;
  neighbors.reserve(static_cast<std::size_t>(N) - 1);
  for (Eigen::Index q = 0; q < N; ++q) {
    neighbors.clear();
    for (Eigen::Index j = 0; j < N; ++j) {
      if (j == q) continue;
      neighbors.emplace_back(sq_dist(emb.embeddings, q, j), static_cast<int>(j));
    }
    std::sort(neighbors.begin(), neighbors.end());
    for (int k : ks) {
      bool hit = false;
      for (int r = 0; r < k && !hit; ++r)
        hit = labels[static_cast<std::size_t>(neighbors[static_cast<std::size_t>(r)].second)] ==
              labels[static_cast<std::size_t>(q)];
      if (hit) result[k] += 1.0;
    }
  }
  for (auto& [k, v] : result) v /= static_cast<double>(N);
  return result;
}

ClusterAssignment kmeans(const EmbeddingBatch& emb, int k, std::uint64_t seed) {
  const Eigen::Index N = emb.embeddings.rows();
  const Eigen::Index D = emb.embeddings.cols();
  if (k < 1 || k > N) throw std::invalid_argument("kmeans: need 1 <= k <= N");

  std::mt19937_64 rng(seed);
  const Eigen::MatrixXd& X = emb.embeddings;

  // k-means++ seeding
  Eigen::MatrixXd centroids(k, D);
  std::vector<double> d2(static_cast<std::size_t>(N),
                         std::numeric_limits<double>::infinity());
  centroids.row(0) = X.row(uniform_index(rng, static_cast<int>(N)));
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < N; ++i) {
      const double d = (X.row(i) - centroids.row(c - 1)).squaredNorm();
      d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], d);
      total += d2[static_cast<std::size_t>(i)];
    }
    Eigen::Index pick = 0;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double acc = 0.0;
      pick = N - 1;
      for (Eigen::Index i = 0; i < N; ++i) {
        acc += d2[static_cast<std::size_t>(i)];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = uniform_index(rng, static_cast<int>(N));
    }
    centroids.row(c) = X.row(pick);
  }

  ClusterAssignment out;
  out.cluster.assign(static_cast<std::size_t>(N), 0);
  std::vector<double> assigned_d2(static_cast<std::size_t>(N), 0.0);

  auto assign_all = [&]() {
    for (Eigen::Index i = 0; i < N; ++i) {
      int best = 0;
      double best_d = (X.row(i) - centroids.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (X.row(i) - centroids.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      out.cluster[static_cast<std::size_t>(i)] = best;
      assigned_d2[static_cast<std::size_t>(i)] = best_d;
    }
  };

  for (int iter = 0; iter < 100; ++iter) {
    assign_all();

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, D);
    std::vector<long> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < N; ++i) {
      sums.row(out.cluster[static_cast<std::size_t>(i)]) += X.row(i);
      ++counts[static_cast<std::size_t>(out.cluster[static_cast<std::size_t>(i)])];
    }

    std::vector<char> taken(static_cast<std::size_t>(N), 0);
    Eigen::MatrixXd next(k, D);
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        next.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      } else {
        // re-seed at the point currently worst served
        Eigen::Index far = 0;
        double far_d = -1.0;
        for (Eigen::Index i = 0; i < N; ++i) {
          if (taken[static_cast<std::size_t>(i)]) continue;
          if (assigned_d2[static_cast<std::size_t>(i)] > far_d) {
            far_d = assigned_d2[static_cast<std::size_t>(i)];
            far = i;
          }
        }
        taken[static_cast<std::size_t>(far)] = 1;
        next.row(c) = X.row(far);
      }
    }

    const double shift = (next - centroids).rowwise().norm().maxCoeff();
    centroids = next;
    if (shift < 1e-6) break;
  }

  assign_all();
  out.inertia = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) out.inertia += assigned_d2[static_cast<std::size_t>(i)];
  return out;
}

double nmi(const ClusterAssignment& assign, const std::vector<int>& labels) {
  check_labels(assign.cluster.size(), labels, "nmi");
  const long N = static_cast<long>(labels.size());
  int C = 0, L = 0;
  for (int c : assign.cluster) C = std::max(C, c + 1);
  for (int l : labels) L = std::max(L, l + 1);

  std::vector<long> joint(static_cast<std::size_t>(C) * static_cast<std::size_t>(L), 0);
  std::vector<long> nc(static_cast<std::size_t>(C), 0), nl(static_cast<std::size_t>(L), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int c = assign.cluster[i];
    const int l = labels[i];
    ++joint[static_cast<std::size_t>(c) * static_cast<std::size_t>(L) +
            static_cast<std::size_t>(l)];
    ++nc[static_cast<std::size_t>(c)];
    ++nl[static_cast<std::size_t>(l)];
  }

  const double hc = entropy(nc, N);
  const double hl = entropy(nl, N);
  if (hc == 0.0 && hl == 0.0) return 1.0;
  if (hc == 0.0 || hl == 0.0) return 0.0;

  double mi = 0.0;
  for (int c = 0; c < C; ++c) {
    for (int l = 0; l < L; ++l) {
      const long n = joint[static_cast<std::size_t>(c) * static_cast<std::size_t>(L) +
                           static_cast<std::size_t>(l)];
      if (n == 0) continue;
      const double pn = static_cast<double>(n) / static_cast<double>(N);
      mi += pn * std::log(static_cast<double>(n) * static_cast<double>(N) /
                          (static_cast<double>(nc[static_cast<std::size_t>(c)]) *
                           static_cast<double>(nl[static_cast<std::size_t>(l)])));
    }
  }
  return 2.0 * mi / (hc + hl);
}

double pairwise_f1(const ClusterAssignment& assign, const std::vector<int>& labels) {
  check_labels(assign.cluster.size(), labels, "pairwise_f1");
  if (labels.size() < 2) throw std::invalid_argument("pairwise_f1: need at least 2 rows");
  long tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      const bool same_cluster = assign.cluster[i] == assign.cluster[j];
      const bool same_label = labels[i] == labels[j];
      if (same_cluster && same_label) ++tp;
      else if (same_cluster) ++fp;
      else if (same_label) ++fn;
    }
  }
  const double precision =
      tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  const double recall =
      tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double weighted_metric(const MetricReport& report,
                       const std::map<std::string, double>& weights) {
  double sum = 0.0;
  double value = 0.0;
  for (const auto& [name, w] : weights) {
    if (w < 0.0) throw std::invalid_argument("weighted_metric: negative weight");
    sum += w;
    double m = 0.0;
    if (name == "nmi") {
      m = report.nmi;
    } else if (name == "f1") {
      m = report.f1;
    } else if (name.rfind("recall@", 0) == 0) {
      const int k = std::stoi(name.substr(7));
      const auto it = report.recall.find(k);
      if (it == report.recall.end())
        throw std::invalid_argument("weighted_metric: recall@" + std::to_string(k) +
                                    " not present in report");
      m = it->second;
    } else {
      throw std::invalid_argument("weighted_metric: unknown metric " + name);
    }
    value += w * m;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("weighted_metric: weights must sum to 1");
  return value;
}

MetricReport evaluate_embeddings(const EmbeddingBatch& emb,
                                 const std::vector<int>& labels,
                                 const std::vector<int>& ks,
                                 const std::map<std::string, double>& weights,
                                 std::uint64_t kmeans_seed) {
  MetricReport report;
  report.recall = recall_at_k(emb, labels, ks);
  int classes = 0;
  for (int l : labels) classes = std::max(classes, l + 1);
  const ClusterAssignment assign = kmeans(emb, classes, kmeans_seed);
  report.nmi = nmi(assign, labels);
  report.f1 = pairwise_f1(assign, labels);
  report.weighted = weighted_metric(report, weights);
  return report;
}

}  // namespace asrlab
