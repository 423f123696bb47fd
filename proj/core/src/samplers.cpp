#include "asrlab/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "asrlab/random.hpp"

namespace asrlab {
namespace {

constexpr double kInitFloor = 1e-6;
constexpr double kActionFloor = 1e-9;
constexpr double kDistanceClip = 0.5;
constexpr double kInverseDensityCap = 100.0;

void normalize(std::vector<double>& w) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (total <= 0.0) throw std::runtime_error("sampling weights sum to zero");
  for (double& v : w) v /= total;
}

// Unnormalized density of the distance between two random unit vectors in
// n dimensions: d^(n-2) (1 - d^2/4)^((n-3)/2).
double pair_distance_density(double d, int n) {
  return std::pow(d, n - 2) * std::pow(1.0 - d * d / 4.0, (n - 3) / 2.0);
}

double inverse_density_weight(double d, int n) {
  const double q = pair_distance_density(d, n);
  return std::min(1.0 / q, kInverseDensityCap);
}

int draw_weighted(const std::vector<double>& weights, double total,
                  std::mt19937_64& rng) {
  const double target = uniform01(rng) * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (acc >= target && weights[i] > 0.0) return static_cast<int>(i);
  }
  for (std::size_t i = weights.size(); i-- > 0;)
    if (weights[i] > 0.0) return static_cast<int>(i);
  return static_cast<int>(weights.size()) - 1;
}

}  // namespace

void SamplingDistribution::validate() const {
  if (bin_edges.size() != weights.size() + 1)
    throw std::invalid_argument("distribution: edge/weight count mismatch");
  if (weights.empty()) throw std::invalid_argument("distribution: no bins");
  if (bin_edges.front() != 0.0 || bin_edges.back() != 2.0)
    throw std::invalid_argument("distribution: edges must span [0, 2]");
  for (std::size_t i = 1; i < bin_edges.size(); ++i)
    if (bin_edges[i] <= bin_edges[i - 1])
      throw std::invalid_argument("distribution: edges must increase");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("distribution: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("distribution: weights must sum to 1");
}

const char* to_string(InitKind kind) {
  switch (kind) {
    case InitKind::uniform_low: return "uniform_low";
    case InitKind::uniform_high: return "uniform_high";
    case InitKind::distance: return "distance";
    case InitKind::random: return "random";
    case InitKind::normal_high: return "normal_high";
    case InitKind::normal_low: return "normal_low";
  }
  throw std::invalid_argument("to_string: bad InitKind");
}

InitKind init_kind_from_string(const std::string& name) {
  if (name == "uniform_low") return InitKind::uniform_low;
  if (name == "uniform_high") return InitKind::uniform_high;
  if (name == "distance") return InitKind::distance;
  if (name == "random") return InitKind::random;
  if (name == "normal_high") return InitKind::normal_high;
  if (name == "normal_low") return InitKind::normal_low;
  throw std::invalid_argument("unknown initial distribution kind: " + name);
}

SamplingDistribution init_distribution(const InitialDistributionSpec& spec, int B) {
  if (B < 2) throw std::invalid_argument("init_distribution: need B >= 2");

  double mu = spec.mu;
  double sigma = spec.sigma;
  switch (spec.kind) {
    case InitKind::uniform_low:
      if (mu < 0.0) mu = 0.5;
      if (sigma < 0.0) sigma = 0.2;
      break;
    case InitKind::uniform_high:
      if (mu < 0.0) mu = 1.5;
      if (sigma < 0.0) sigma = 0.2;
      break;
    case InitKind::normal_high:
      if (mu < 0.0) mu = 1.6;
      if (sigma < 0.0) sigma = 0.04;
      break;
    case InitKind::normal_low:
      if (mu < 0.0) mu = 0.5;
      if (sigma < 0.0) sigma = 0.05;
      break;
    case InitKind::distance:
    case InitKind::random:
      break;
  }

  SamplingDistribution dist;
  dist.bin_edges.resize(static_cast<std::size_t>(B) + 1);
  for (int i = 0; i <= B; ++i)
    dist.bin_edges[static_cast<std::size_t>(i)] = 2.0 * static_cast<double>(i) / B;
  dist.weights.assign(static_cast<std::size_t>(B), 0.0);

  std::mt19937_64 rng(spec.seed);
  for (int b = 0; b < B; ++b) {
    const double center =
        0.5 * (dist.bin_edges[static_cast<std::size_t>(b)] +
               dist.bin_edges[static_cast<std::size_t>(b) + 1]);
    double density = 0.0;
    switch (spec.kind) {
      case InitKind::uniform_low:
      case InitKind::uniform_high:
        density = (center >= mu - sigma && center <= mu + sigma) ? 1.0 : 0.0;
        break;
      case InitKind::normal_high:
      case InitKind::normal_low: {
        const double z = (center - mu) / sigma;
        density = std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
        break;
      }
      case InitKind::random:
        density = uniform01(rng);
        break;
      case InitKind::distance:
        density = center >= kDistanceClip
                      ? inverse_density_weight(center, spec.embed_dim)
                      : 0.0;
        break;
    }
    dist.weights[static_cast<std::size_t>(b)] = std::max(density, kInitFloor);
  }
  normalize(dist.weights);
  return dist;
}

SamplingDistribution uniform_distribution(int B) {
  if (B < 2) throw std::invalid_argument("uniform_distribution: need B >= 2");
  SamplingDistribution dist;
  dist.bin_edges.resize(static_cast<std::size_t>(B) + 1);
  for (int i = 0; i <= B; ++i)
    dist.bin_edges[static_cast<std::size_t>(i)] = 2.0 * static_cast<double>(i) / B;
  dist.weights.assign(static_cast<std::size_t>(B), 1.0 / B);
  return dist;
}

int bin_index(const SamplingDistribution& dist, double d) {
  const int B = dist.bins();
  if (d <= 0.0) return 0;
  if (d >= 2.0) return B - 1;
  const int b = static_cast<int>(d / 2.0 * B);
  return std::min(b, B - 1);
}

ActionId encode_action(const DecodedAction& a, int B) {
  if (a.noop) return ActionId{0};
  if (a.bin < 0 || a.bin >= B) throw std::invalid_argument("encode_action: bad bin");
  return ActionId{1 + 2 * a.bin + (a.up ? 0 : 1)};
}

DecodedAction decode_action(ActionId action, int B) {
  if (action.code < 0 || action.code > 2 * B)
    throw std::invalid_argument("decode_action: code out of range");
  DecodedAction out;
  if (action.code == 0) return out;
  out.noop = false;
  out.bin = (action.code - 1) / 2;
  out.up = (action.code - 1) % 2 == 0;
  return out;
}

SamplingDistribution apply_action(const SamplingDistribution& dist, ActionId action,
                                  double c) {
  if (c <= 1.0) throw std::invalid_argument("apply_action: multiplier must exceed 1");
  const DecodedAction a = decode_action(action, dist.bins());
  if (a.noop) return dist;
  SamplingDistribution out = dist;
  auto& w = out.weights[static_cast<std::size_t>(a.bin)];
  w = a.up ? w * c : w / c;
  for (double& v : out.weights) v = std::max(v, kActionFloor);
  normalize(out.weights);
  return out;
}

int sample_negative(const SamplingDistribution& dist, int anchor,
                    const std::vector<int>& candidates, const EmbeddingBatch& emb,
                    std::mt19937_64& rng) {
  if (candidates.empty()) throw std::invalid_argument("sample_negative: no candidates");
  const int B = dist.bins();
  std::vector<std::vector<int>> by_bin(static_cast<std::size_t>(B));
  for (int c : candidates) {
    const double d = (emb.embeddings.row(anchor) - emb.embeddings.row(c)).norm();
    by_bin[static_cast<std::size_t>(bin_index(dist, d))].push_back(c);
  }
  std::vector<double> occupied(static_cast<std::size_t>(B), 0.0);
  double total = 0.0;
  for (int b = 0; b < B; ++b) {
    if (!by_bin[static_cast<std::size_t>(b)].empty()) {
      occupied[static_cast<std::size_t>(b)] = dist.weights[static_cast<std::size_t>(b)];
      total += occupied[static_cast<std::size_t>(b)];
    }
  }
  if (total <= 0.0)
    return candidates[static_cast<std::size_t>(
        uniform_index(rng, static_cast<int>(candidates.size())))];
  const int bin = draw_weighted(occupied, total, rng);
  const auto& members = by_bin[static_cast<std::size_t>(bin)];
  return members[static_cast<std::size_t>(
      uniform_index(rng, static_cast<int>(members.size())))];
}

int semihard_negative(int a, int p, const std::vector<int>& candidates,
                      const EmbeddingBatch& emb, double gamma, std::mt19937_64& rng) {
  if (candidates.empty()) throw std::invalid_argument("semihard_negative: no candidates");
  const double d_ap = (emb.embeddings.row(a) - emb.embeddings.row(p)).norm();
  std::vector<int> band;
  int closest_beyond = -1;
  double closest_d = std::numeric_limits<double>::infinity();
  for (int c : candidates) {
    const double d_an = (emb.embeddings.row(a) - emb.embeddings.row(c)).norm();
    if (d_an > d_ap && d_an < d_ap + gamma) band.push_back(c);
    if (d_an > d_ap && d_an < closest_d) {
      closest_d = d_an;
      closest_beyond = c;
    }
  }
  if (!band.empty())
    return band[static_cast<std::size_t>(uniform_index(rng, static_cast<int>(band.size())))];
  if (closest_beyond >= 0) return closest_beyond;
  return candidates[static_cast<std::size_t>(
      uniform_index(rng, static_cast<int>(candidates.size())))];
}

int distance_weighted_negative(int a, const std::vector<int>& candidates,
                               const EmbeddingBatch& emb, std::mt19937_64& rng) {
  if (candidates.empty())
    throw std::invalid_argument("distance_weighted_negative: no candidates");
  const int n = static_cast<int>(emb.embeddings.cols());
  std::vector<double> weights(candidates.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double d =
        (emb.embeddings.row(a) - emb.embeddings.row(candidates[i])).norm();
    weights[i] = inverse_density_weight(std::max(d, kDistanceClip), n);
    total += weights[i];
  }
  if (total <= 0.0)
    return candidates[static_cast<std::size_t>(
        uniform_index(rng, static_cast<int>(candidates.size())))];
  return candidates[static_cast<std::size_t>(draw_weighted(weights, total, rng))];
}

TripletBatch build_triplets(const std::vector<int>& batch_indices,
                            const std::vector<int>& labels, const EmbeddingBatch& emb,
                            const TripletSamplerContext& ctx, std::mt19937_64& rng) {
  if (ctx.strategy == NegativeStrategy::binned && ctx.dist == nullptr)
    throw std::invalid_argument("build_triplets: binned strategy needs a distribution");

  SamplingDistribution uniform;
  const SamplingDistribution* dist = ctx.dist;
  if (ctx.strategy == NegativeStrategy::random) {
    uniform = uniform_distribution(ctx.bins);
    dist = &uniform;
  }

  TripletBatch batch;
  for (int a : batch_indices) {
    std::vector<int> positives, negatives;
    for (int other : batch_indices) {
      if (other == a) continue;
      if (labels[static_cast<std::size_t>(other)] == labels[static_cast<std::size_t>(a)])
        positives.push_back(other);
      else
        negatives.push_back(other);
    }
    if (positives.empty() || negatives.empty()) continue;
    const int p = positives[static_cast<std::size_t>(
        uniform_index(rng, static_cast<int>(positives.size())))];
    int n = -1;
    switch (ctx.strategy) {
      case NegativeStrategy::random:
      case NegativeStrategy::binned:
        n = sample_negative(*dist, a, negatives, emb, rng);
        break;
      case NegativeStrategy::semihard:
        n = semihard_negative(a, p, negatives, emb, ctx.gamma, rng);
        break;
      case NegativeStrategy::distance:
        n = distance_weighted_negative(a, negatives, emb, rng);
        break;
    }
    batch.triplets.push_back(Triplet{a, p, n});
  }
  if (batch.triplets.empty())
    throw std::invalid_argument("build_triplets: no anchor has both a positive and a negative");
  return batch;
}

}  // namespace asrlab
