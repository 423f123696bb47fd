#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "asrlab/encoder.hpp"
#include "asrlab/losses.hpp"

namespace asrlab {

// Distance histogram over [0, 2] that negatives are drawn from. Weights live
// on the probability simplex.
struct SamplingDistribution {
  std::vector<double> bin_edges;  // B+1, uniform, first 0, last 2
  std::vector<double> weights;    // B, non-negative, sum 1

  int bins() const { return static_cast<int>(weights.size()); }
  void validate() const;
};

enum class InitKind { uniform_low, uniform_high, distance, random, normal_high, normal_low };

const char* to_string(InitKind kind);
InitKind init_kind_from_string(const std::string& name);

// Window/Gaussian parameters; mu and sigma default per kind when < 0.
struct InitialDistributionSpec {
  InitKind kind = InitKind::uniform_low;
  double mu = -1.0;
  double sigma = -1.0;
  int embed_dim = 16;        // distance kind
  std::uint64_t seed = 0;    // random kind
};

// Evaluates the requested density at bin centers, floors each bin at 1e-6,
// then normalizes.
SamplingDistribution init_distribution(const InitialDistributionSpec& spec, int B);

SamplingDistribution uniform_distribution(int B);

// Bin of a distance; d = 2 lands in the last bin.
int bin_index(const SamplingDistribution& dist, double d);

// Action space {no-op} + {(bin, up), (bin, down)}: code 0 is no-op, then
// codes 1+2b (up) and 2+2b (down) per bin b.
struct ActionId {
  int code = 0;
};

struct DecodedAction {
  bool noop = true;
  int bin = 0;
  bool up = false;
};

constexpr int action_count(int B) { return 2 * B + 1; }
ActionId encode_action(const DecodedAction& a, int B);
DecodedAction decode_action(ActionId action, int B);

// Multiplies (up) or divides (down) one bin weight by c, floors all weights
// at 1e-9, renormalizes. No-op returns the input unchanged.
SamplingDistribution apply_action(const SamplingDistribution& dist, ActionId action,
                                  double c = 2.0);

// Draws a bin proportional to weight among bins holding at least one
// candidate, then a uniform candidate within it. Falls back to a uniform
// candidate when every occupied bin has zero weight.
int sample_negative(const SamplingDistribution& dist, int anchor,
                    const std::vector<int>& candidates, const EmbeddingBatch& emb,
                    std::mt19937_64& rng);

// Uniform choice among candidates with d_ap < d_an < d_ap + gamma; else the
// closest candidate beyond d_ap; else uniform.
int semihard_negative(int a, int p, const std::vector<int>& candidates,
                      const EmbeddingBatch& emb, double gamma, std::mt19937_64& rng);

// Draws candidate i with probability proportional to
// min(1/q(max(d_i, 0.5)), 100), where q is the unnormalized density of
// pairwise distances between unit vectors in emb's output dimension.
int distance_weighted_negative(int a, const std::vector<int>& candidates,
                               const EmbeddingBatch& emb, std::mt19937_64& rng);

enum class NegativeStrategy { random, semihard, distance, binned };

struct TripletSamplerContext {
  NegativeStrategy strategy = NegativeStrategy::random;
  const SamplingDistribution* dist = nullptr;  // binned strategy
  double gamma = 0.2;                          // semihard band width
  int bins = 10;                               // random strategy bin count
};

// One triplet per anchor that has both a same-class and a diff-class batch
// member: positive uniform, negative per strategy. Indices refer to rows of
// emb; labels align with emb rows.
TripletBatch build_triplets(const std::vector<int>& batch_indices,
                            const std::vector<int>& labels, const EmbeddingBatch& emb,
                            const TripletSamplerContext& ctx, std::mt19937_64& rng);

}  // namespace asrlab
