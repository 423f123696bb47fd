#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "asrlab/asr_loop.hpp"
#include "asrlab/dataset.hpp"
#include "asrlab/encoder.hpp"
#include "asrlab/losses.hpp"
#include "asrlab/metrics.hpp"
#include "asrlab/random.hpp"
#include "asrlab/rl.hpp"
#include "asrlab/samplers.hpp"

namespace {

asrlab::LabeledDataset bench_blobs(int classes, int per_class, int dim) {
  asrlab::BlobSpec spec;
  spec.num_classes = classes;
  spec.points_per_class = per_class;
  spec.dim = dim;
  spec.spread = 0.05;
  spec.seed = 7;
  return asrlab::gen_gaussian_blobs(spec);
}

void bm_embed_forward(benchmark::State& state) {
  const auto data = bench_blobs(8, 64, 20);
  const auto params = asrlab::init_encoder(20, 64, 16, 11);
  for (auto _ : state) {
    auto batch = asrlab::embed_forward(params, data.features);
    benchmark::DoNotOptimize(batch.embeddings.data());
  }
}
BENCHMARK(bm_embed_forward);

void bm_embed_backward(benchmark::State& state) {
  const auto data = bench_blobs(8, 64, 20);
  const auto params = asrlab::init_encoder(20, 64, 16, 11);
  const auto batch = asrlab::embed_forward(params, data.features);
  Eigen::MatrixXd grad = Eigen::MatrixXd::Constant(batch.embeddings.rows(),
                                                   batch.embeddings.cols(), 0.01);
  for (auto _ : state) {
    auto grads = asrlab::embed_backward(batch, grad, params);
    benchmark::DoNotOptimize(grads.W1.data());
  }
}
BENCHMARK(bm_embed_backward);

void bm_triplet_loss(benchmark::State& state) {
  const auto data = bench_blobs(8, 64, 20);
  const auto params = asrlab::init_encoder(20, 64, 16, 11);
  const auto batch = asrlab::embed_forward(params, data.features);
  std::mt19937_64 rng(3);
  asrlab::TripletSamplerContext ctx;
  ctx.strategy = asrlab::NegativeStrategy::random;
  std::vector<int> indices(static_cast<std::size_t>(data.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = static_cast<int>(i);
  const auto triplets = asrlab::build_triplets(indices, data.labels, batch, ctx, rng);
  for (auto _ : state) {
    auto report = asrlab::triplet_loss(batch, triplets, 0.2);
    benchmark::DoNotOptimize(report.value);
  }
}
BENCHMARK(bm_triplet_loss);

void bm_recall_at_k(benchmark::State& state) {
  const auto data = bench_blobs(8, 64, 20);
  const auto params = asrlab::init_encoder(20, 64, 16, 11);
  const auto batch = asrlab::embed_forward(params, data.features);
  const std::vector<int> ks{1, 2, 4, 8};
  for (auto _ : state) {
    auto r = asrlab::recall_at_k(batch, data.labels, ks);
    benchmark::DoNotOptimize(r.at(1));
  }
}
BENCHMARK(bm_recall_at_k);

void bm_kmeans(benchmark::State& state) {
  const auto data = bench_blobs(8, 64, 20);
  const auto params = asrlab::init_encoder(20, 64, 16, 11);
  const auto batch = asrlab::embed_forward(params, data.features);
  for (auto _ : state) {
    auto assign = asrlab::kmeans(batch, 8, 5);
    benchmark::DoNotOptimize(assign.inertia);
  }
}
BENCHMARK(bm_kmeans);

void bm_sample_negative(benchmark::State& state) {
  const auto dist = asrlab::uniform_distribution(10);
  std::mt19937_64 rng(5);
  const auto data = bench_blobs(8, 64, 20);
  const auto params = asrlab::init_encoder(20, 64, 16, 11);
  const auto batch = asrlab::embed_forward(params, data.features);
  std::vector<int> candidates;
  for (int i = 1; i < data.size(); ++i) candidates.push_back(i);
  for (auto _ : state) {
    int pick = asrlab::sample_negative(dist, 0, candidates, batch, rng);
    benchmark::DoNotOptimize(pick);
  }
}
BENCHMARK(bm_sample_negative);

void bm_ppo_update(benchmark::State& state) {
  std::mt19937_64 rng(9);
  auto params = asrlab::init_policy(11, 32, 21, 13);
  auto old_params = params;
  asrlab::TrajectoryBuffer buffer;
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int t = 0; t < 40; ++t) {
    asrlab::Transition tr;
    tr.state = Eigen::VectorXd::NullaryExpr(11, [&](Eigen::Index) { return gauss(rng); });
    tr.action = asrlab::ActionId{t % 21};
    const auto probs = asrlab::policy_forward(params, tr.state);
    tr.logp_old = std::log(probs(t % 21));
    tr.reward = gauss(rng);
    buffer.transitions.push_back(tr);
  }
  asrlab::PolicyConfig cfg;
  for (auto _ : state) {
    auto work = params;
    auto old_copy = old_params;
    asrlab::ppo_update(work, old_copy, buffer, cfg, false);
    benchmark::DoNotOptimize(work.V1.data());
  }
}
BENCHMARK(bm_ppo_update);

}  // namespace

BENCHMARK_MAIN();
