#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "asrlab/random.hpp"
#include "asrlab/samplers.hpp"
#include "doctest.h"

using namespace asrlab;

namespace {

// 1-d embeddings make every pairwise distance explicit.
EmbeddingBatch line_embeddings(const std::vector<double>& xs) {
  EmbeddingBatch b;
  b.embeddings.resize(static_cast<Eigen::Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i)
    b.embeddings(static_cast<Eigen::Index>(i), 0) = xs[i];
  return b;
}

SamplingDistribution dist_of(std::vector<double> weights) {
  SamplingDistribution d;
  const int B = static_cast<int>(weights.size());
  d.bin_edges.resize(static_cast<std::size_t>(B) + 1);
  for (int i = 0; i <= B; ++i)
    d.bin_edges[static_cast<std::size_t>(i)] = 2.0 * static_cast<double>(i) / B;
  d.weights = std::move(weights);
  return d;
}

std::map<int, double> draw_frequencies(const std::function<int()>& draw, int trials) {
  std::map<int, int> counts;
  for (int t = 0; t < trials; ++t) ++counts[draw()];
  std::map<int, double> freq;
  for (const auto& [k, c] : counts)
    freq[k] = static_cast<double>(c) / static_cast<double>(trials);
  return freq;
}

}  // namespace

TEST_CASE("distribution validation enforces the simplex and the edge grid") {
  SamplingDistribution d = dist_of({0.25, 0.25, 0.25, 0.25});
  d.validate();

  SamplingDistribution bad = d;
  bad.weights[0] = -0.1;
  bad.weights[1] = 0.6;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = d;
  bad.weights[0] = 0.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = d;
  bad.bin_edges[0] = 0.1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = d;
  bad.bin_edges[2] = bad.bin_edges[1];
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = d;
  bad.bin_edges.pop_back();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("init kind names round-trip") {
  for (InitKind kind : {InitKind::uniform_low, InitKind::uniform_high,
                        InitKind::distance, InitKind::random, InitKind::normal_high,
                        InitKind::normal_low})
    CHECK(init_kind_from_string(to_string(kind)) == kind);
  CHECK_THROWS_AS(init_kind_from_string("gauss"), std::invalid_argument);
}

TEST_CASE("uniform window inits concentrate mass on their band") {
  InitialDistributionSpec low;
  low.kind = InitKind::uniform_low;
  const SamplingDistribution d = init_distribution(low, 20);
  d.validate();
  // band [0.3, 0.7] covers the four bins whose centers are 0.35 .. 0.65
  for (int b = 0; b < 20; ++b) {
    const double center = (d.bin_edges[static_cast<std::size_t>(b)] +
                           d.bin_edges[static_cast<std::size_t>(b) + 1]) /
                          2.0;
    if (center > 0.3 && center < 0.7) {
      CHECK(d.weights[static_cast<std::size_t>(b)] > 0.2);
    } else {
      CHECK(d.weights[static_cast<std::size_t>(b)] < 1e-5);
    }
  }

  InitialDistributionSpec high;
  high.kind = InitKind::uniform_high;
  const SamplingDistribution dh = init_distribution(high, 20);
  double mass_high = 0.0;
  for (int b = 13; b <= 16; ++b) mass_high += dh.weights[static_cast<std::size_t>(b)];
  CHECK(mass_high > 0.999);

  InitialDistributionSpec custom = low;
  custom.mu = 1.0;
  custom.sigma = 0.1;
  const SamplingDistribution dc = init_distribution(custom, 20);
  CHECK(dc.weights[9] > 0.45);
  CHECK(dc.weights[10] > 0.45);
}

TEST_CASE("normal inits peak at their mean") {
  InitialDistributionSpec nh;
  nh.kind = InitKind::normal_high;
  const SamplingDistribution dh = init_distribution(nh, 10);
  dh.validate();
  // mu 1.6 sits exactly between the bin centers 1.5 and 1.7
  CHECK(dh.weights[7] == dh.weights[8]);
  for (int b = 0; b < 10; ++b) {
    if (b == 7 || b == 8) continue;
    CHECK(dh.weights[static_cast<std::size_t>(b)] < dh.weights[7]);
  }

  InitialDistributionSpec nl;
  nl.kind = InitKind::normal_low;
  const SamplingDistribution dl = init_distribution(nl, 10);
  int argmax = 0;
  for (int b = 1; b < 10; ++b)
    if (dl.weights[static_cast<std::size_t>(b)] > dl.weights[static_cast<std::size_t>(argmax)])
      argmax = b;
  CHECK(argmax == 2);
}

TEST_CASE("distance init reproduces the clipped inverse-density weights") {
  InitialDistributionSpec spec;
  spec.kind = InitKind::distance;
  spec.embed_dim = 16;
  // B=5 bin centers 0.2, 0.6, 1.0, 1.4, 1.8: the first is clipped away and
  // the rest carry min(1/q(d), 100) for the 16-dim unit-sphere density q
  const SamplingDistribution d = init_distribution(spec, 5);
  d.validate();
  const std::vector<double> expected = {8.318478764037538e-09, 0.8318478764037539,
                                        0.05396916517479533, 0.005957242348352755,
                                        0.10822570775461929};
  for (int b = 0; b < 5; ++b)
    CHECK(d.weights[static_cast<std::size_t>(b)] ==
          doctest::Approx(expected[static_cast<std::size_t>(b)]).epsilon(1e-12));
}

TEST_CASE("random init is seeded and stays on the simplex") {
  InitialDistributionSpec spec;
  spec.kind = InitKind::random;
  spec.seed = 42;
  const SamplingDistribution a = init_distribution(spec, 10);
  const SamplingDistribution b = init_distribution(spec, 10);
  a.validate();
  CHECK(a.weights == b.weights);
  spec.seed = 43;
  CHECK(init_distribution(spec, 10).weights != a.weights);
}

TEST_CASE("uniform distribution and bin lookup") {
  const SamplingDistribution d = uniform_distribution(10);
  d.validate();
  for (double w : d.weights) CHECK(w == 0.1);
  CHECK_THROWS_AS(uniform_distribution(1), std::invalid_argument);

  CHECK(bin_index(d, -1.0) == 0);
  CHECK(bin_index(d, 0.0) == 0);
  CHECK(bin_index(d, 0.19) == 0);
  CHECK(bin_index(d, 0.21) == 1);
  CHECK(bin_index(d, 1.99) == 9);
  CHECK(bin_index(d, 2.0) == 9);
  CHECK(bin_index(d, 5.0) == 9);
}

TEST_CASE("action codes round-trip and bound-check") {
  const int B = 10;
  CHECK(action_count(B) == 21);
  CHECK(decode_action(ActionId{0}, B).noop);
  for (int code = 0; code <= 2 * B; ++code) {
    const DecodedAction a = decode_action(ActionId{code}, B);
    CHECK(encode_action(a, B).code == code);
  }
  const DecodedAction first = decode_action(ActionId{1}, B);
  CHECK(first.bin == 0);
  CHECK(first.up);
  const DecodedAction second = decode_action(ActionId{2}, B);
  CHECK(second.bin == 0);
  CHECK_FALSE(second.up);
  CHECK_THROWS_AS(decode_action(ActionId{2 * B + 1}, B), std::invalid_argument);
  CHECK_THROWS_AS(decode_action(ActionId{-1}, B), std::invalid_argument);
  DecodedAction bad;
  bad.noop = false;
  bad.bin = B;
  CHECK_THROWS_AS(encode_action(bad, B), std::invalid_argument);
}

TEST_CASE("actions scale one bin and renormalize") {
  const SamplingDistribution d = dist_of({0.1, 0.2, 0.3, 0.4});

  const SamplingDistribution same = apply_action(d, ActionId{0}, 2.0);
  CHECK(same.weights == d.weights);

  DecodedAction up;
  up.noop = false;
  up.bin = 1;
  up.up = true;
  const SamplingDistribution raised = apply_action(d, encode_action(up, 4), 2.0);
  raised.validate();
  // w1 doubles before renormalization: 0.4 / 1.2
  CHECK(raised.weights[1] == doctest::Approx(0.4 / 1.2).epsilon(1e-12));
  CHECK(raised.weights[0] == doctest::Approx(0.1 / 1.2).epsilon(1e-12));

  DecodedAction down = up;
  down.up = false;
  const SamplingDistribution lowered = apply_action(d, encode_action(down, 4), 2.0);
  lowered.validate();
  CHECK(lowered.weights[1] == doctest::Approx(0.1 / 0.9).epsilon(1e-12));

  CHECK_THROWS_AS(apply_action(d, ActionId{1}, 1.0), std::invalid_argument);
}

TEST_CASE("repeated down actions hit the weight floor without leaving the simplex") {
  SamplingDistribution d = dist_of({0.5, 0.5});
  const ActionId down = encode_action([] {
    DecodedAction a;
    a.noop = false;
    a.bin = 0;
    a.up = false;
    return a;
  }(), 2);
  for (int i = 0; i < 60; ++i) d = apply_action(d, down, 2.0);
  d.validate();
  CHECK(d.weights[0] > 0.0);
  CHECK(d.weights[0] < 1e-8);
}

TEST_CASE("binned sampling follows renormalized weights over occupied bins") {
  const SamplingDistribution d = dist_of({0.1, 0.2, 0.3, 0.4});
  // anchor at 0; distances 0.3 and 0.4 land in bin 0, 1.2 in bin 2
  const EmbeddingBatch emb = line_embeddings({0.0, 0.3, 0.4, 1.2});
  const std::vector<int> candidates = {1, 2, 3};

  std::mt19937_64 rng(123);
  const auto freq = draw_frequencies(
      [&]() { return sample_negative(d, 0, candidates, emb, rng); }, 20000);

  // occupied mass {bin0: 0.1, bin2: 0.3} renormalizes to {0.25, 0.75}
  CHECK(freq.at(1) == doctest::Approx(0.125).epsilon(0.12));
  CHECK(freq.at(2) == doctest::Approx(0.125).epsilon(0.12));
  CHECK(freq.at(3) == doctest::Approx(0.75).epsilon(0.05));
}

TEST_CASE("binned sampling falls back to uniform when occupied bins carry no mass") {
  const SamplingDistribution d = dist_of({1.0, 0.0, 0.0, 0.0});
  const EmbeddingBatch emb = line_embeddings({0.0, 1.6, 1.7, 1.8});
  const std::vector<int> candidates = {1, 2, 3};
  std::mt19937_64 rng(7);
  const auto freq = draw_frequencies(
      [&]() { return sample_negative(d, 0, candidates, emb, rng); }, 15000);
  for (int c : candidates) CHECK(freq.at(c) == doctest::Approx(1.0 / 3).epsilon(0.1));

  CHECK_THROWS_AS(sample_negative(d, 0, {}, emb, rng), std::invalid_argument);
}

TEST_CASE("semihard negatives come from the margin band") {
  // anchor 0, positive at 1.0; gamma 0.2 puts the band at (1.0, 1.2)
  const EmbeddingBatch emb = line_embeddings({0.0, 1.0, 0.5, 1.1, 1.15, 1.3});
  std::mt19937_64 rng(99);

  const auto freq = draw_frequencies(
      [&]() { return semihard_negative(0, 1, {2, 3, 4, 5}, emb, 0.2, rng); }, 10000);
  CHECK(freq.count(2) == 0);
  CHECK(freq.count(5) == 0);
  CHECK(freq.at(3) == doctest::Approx(0.5).epsilon(0.1));
  CHECK(freq.at(4) == doctest::Approx(0.5).epsilon(0.1));

  // empty band: the closest candidate beyond the positive wins outright
  for (int i = 0; i < 10; ++i)
    CHECK(semihard_negative(0, 1, {2, 5}, emb, 0.05, rng) == 5);

  // nothing beyond the positive: uniform fallback
  const auto fallback = draw_frequencies(
      [&]() { return semihard_negative(0, 1, {2}, emb, 0.2, rng); }, 100);
  CHECK(fallback.at(2) == 1.0);

  CHECK_THROWS_AS(semihard_negative(0, 1, {}, emb, 0.2, rng), std::invalid_argument);
}

TEST_CASE("distance-weighted sampling matches the frozen inverse-density ratios") {
  // candidates on the 16-dim unit sphere at distances 0.6, 1.0, 1.4 from the anchor
  const int dim = 16;
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(4, dim);
  E(0, 0) = 1.0;
  const std::vector<double> dists = {0.6, 1.0, 1.4};
  for (int i = 0; i < 3; ++i) {
    const double dot = 1.0 - dists[static_cast<std::size_t>(i)] *
                                 dists[static_cast<std::size_t>(i)] / 2.0;
    E(i + 1, 0) = dot;
    E(i + 1, 1) = std::sqrt(1.0 - dot * dot);
  }
  EmbeddingBatch emb;
  emb.embeddings = E;

  std::mt19937_64 rng(2025);
  const auto freq = draw_frequencies(
      [&]() { return distance_weighted_negative(0, {1, 2, 3}, emb, rng); }, 40000);
  // frozen: min(1/q, 100) at d = {0.6, 1.0, 1.4}, q the 16-dim pair-distance
  // density, normalized to {0.93280092, 0.06051886, 0.00668021}
  CHECK(freq.at(1) == doctest::Approx(0.93280092).epsilon(0.02));
  CHECK(freq.at(2) == doctest::Approx(0.06051886).epsilon(0.15));
  CHECK(freq.at(3) == doctest::Approx(0.00668021).epsilon(0.5));

  CHECK_THROWS_AS(distance_weighted_negative(0, {}, emb, rng), std::invalid_argument);
}

TEST_CASE("triplet building pairs each eligible anchor with one positive and one negative") {
  const EmbeddingBatch emb = line_embeddings({0.0, 0.1, 1.0, 1.1, 2.0});
  const std::vector<int> labels = {0, 0, 1, 1, 2};
  const std::vector<int> batch = {0, 1, 2, 3, 4};
  std::mt19937_64 rng(5);

  TripletSamplerContext ctx;
  ctx.strategy = NegativeStrategy::random;
  const TripletBatch t = build_triplets(batch, labels, emb, ctx, rng);
  // row 4 has no positive, so four anchors produce triplets
  CHECK(t.triplets.size() == 4);
  for (const Triplet& tr : t.triplets) {
    CHECK(labels[static_cast<std::size_t>(tr.a)] == labels[static_cast<std::size_t>(tr.p)]);
    CHECK(labels[static_cast<std::size_t>(tr.a)] != labels[static_cast<std::size_t>(tr.n)]);
    CHECK(tr.a != tr.p);
  }

  TripletSamplerContext binned;
  binned.strategy = NegativeStrategy::binned;
  CHECK_THROWS_AS(build_triplets(batch, labels, emb, binned, rng),
                  std::invalid_argument);
  const SamplingDistribution d = uniform_distribution(10);
  binned.dist = &d;
  CHECK(build_triplets(batch, labels, emb, binned, rng).triplets.size() == 4);

  const std::vector<int> same_labels = {0, 0, 0, 0, 0};
  CHECK_THROWS_AS(build_triplets(batch, same_labels, emb, ctx, rng),
                  std::invalid_argument);
}
