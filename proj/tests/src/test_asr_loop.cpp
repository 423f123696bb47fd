#include <cmath>
#include <map>
#include <random>
#include <set>

#include "asrlab/asr_loop.hpp"
#include "doctest.h"

using namespace asrlab;

namespace {

DataBundle tiny_bundle(std::uint64_t seed) {
  BlobSpec spec;
  spec.num_classes = 3;
  spec.points_per_class = 20;
  spec.dim = 5;
  spec.spread = 0.8;
  spec.seed = seed;
  const LabeledDataset data = gen_gaussian_blobs(spec);
  const TrainValSplit tv = split_train_val(data, SplitSpec{0.25, seed});
  return DataBundle{tv.train, tv.val, tv.val};
}

AsrConfig tiny_config() {
  AsrConfig cfg;
  cfg.loss = LossKind::triplet;
  cfg.sampler = SamplerKind::asr_ppo;
  cfg.epochs = 2;
  cfg.inner_iters = 3;
  cfg.batch_size = 16;
  cfg.bins = 5;
  cfg.recall_ks = {1, 2};
  cfg.policy_hidden = 8;
  cfg.encoder_hidden = 16;
  cfg.embed_dim = 8;
  cfg.seed = 11;
  return cfg;
}

bool reports_equal(const MetricReport& a, const MetricReport& b) {
  return a.recall == b.recall && a.nmi == b.nmi && a.f1 == b.f1 &&
         a.weighted == b.weighted;
}

}  // namespace

TEST_CASE("loss and sampler names round-trip") {
  for (LossKind k : {LossKind::contrastive, LossKind::triplet, LossKind::margin})
    CHECK(loss_kind_from_string(to_string(k)) == k);
  for (SamplerKind k : {SamplerKind::random, SamplerKind::semihard,
                        SamplerKind::distance, SamplerKind::asr_reinforce,
                        SamplerKind::asr_ppo})
    CHECK(sampler_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(loss_kind_from_string("hinge"), std::invalid_argument);
  CHECK_THROWS_AS(sampler_kind_from_string("hard"), std::invalid_argument);
}

TEST_CASE("the loss margin defaults per loss and respects overrides") {
  AsrConfig cfg;
  cfg.loss = LossKind::contrastive;
  CHECK(loss_gamma(cfg) == 1.0);
  cfg.loss = LossKind::triplet;
  CHECK(loss_gamma(cfg) == 0.2);
  cfg.loss = LossKind::margin;
  CHECK(loss_gamma(cfg) == 0.2);
  cfg.gamma = 0.7;
  CHECK(loss_gamma(cfg) == 0.7);
}

TEST_CASE("iterations per epoch round up") {
  CHECK(iters_per_epoch(10, 3) == 4);
  CHECK(iters_per_epoch(9, 3) == 3);
  CHECK(iters_per_epoch(1, 32) == 1);
  CHECK_THROWS_AS(iters_per_epoch(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(iters_per_epoch(10, 0), std::invalid_argument);
}

TEST_CASE("balanced batches draw distinct rows across several classes") {
  std::vector<std::vector<int>> by_class(4);
  for (int c = 0; c < 4; ++c)
    for (int i = 0; i < 10; ++i) by_class[static_cast<std::size_t>(c)].push_back(c * 10 + i);

  std::mt19937_64 rng(4);
  const std::vector<int> batch = make_balanced_batch(by_class, 8, rng);
  CHECK(batch.size() == 8);
  std::map<int, int> per_class;
  for (int row : batch) ++per_class[row / 10];
  CHECK(per_class.size() == 4);
  for (const auto& [c, n] : per_class) CHECK(n == 2);
  CHECK(std::set<int>(batch.begin(), batch.end()).size() == batch.size());

  std::mt19937_64 again(4);
  CHECK(make_balanced_batch(by_class, 8, again) == batch);

  // short classes cap their contribution at the class size
  std::vector<std::vector<int>> uneven(2);
  uneven[0] = {0, 1, 2, 3, 4};
  for (int i = 0; i < 20; ++i) uneven[1].push_back(100 + i);
  std::mt19937_64 rng2(9);
  const std::vector<int> big = make_balanced_batch(uneven, 32, rng2);
  CHECK(big.size() == 21);

  CHECK_THROWS_AS(make_balanced_batch({}, 8, rng), std::invalid_argument);
  CHECK_THROWS_AS(make_balanced_batch(by_class, 1, rng), std::invalid_argument);
}

TEST_CASE("an adaptive episode logs rewards, states, and distribution moves") {
  const DataBundle data = tiny_bundle(3);
  const AsrConfig cfg = tiny_config();
  const RunLog log = run_episode(cfg, data.train, data.val, data.test);

  // 45 train rows, batch 16: 3 iters/epoch, 6 total, blocks of 3 -> 2 steps
  REQUIRE(log.records.size() == 3);
  CHECK(log.seed == cfg.seed);

  for (std::size_t t = 0; t < log.records.size(); ++t) {
    const EvalRecord& rec = log.records[t];
    CHECK(rec.step == static_cast<int>(t));
    CHECK(rec.state.size() == 2 + cfg.bins);
    CHECK(rec.state(0) == rec.metrics.weighted);
    CHECK(rec.action.code >= 0);
    CHECK(rec.action.code <= 2 * cfg.bins);

    REQUIRE(rec.dist_weights.size() == static_cast<std::size_t>(cfg.bins));
    double total = 0.0;
    for (double w : rec.dist_weights) {
      CHECK(w >= 0.0);
      total += w;
    }
    CHECK(std::abs(total - 1.0) <= 1e-9);
  }

  CHECK(log.records[0].reward == 0.0);
  CHECK(log.records[0].state(1 + cfg.bins) == 0.0);
  CHECK(log.records.back().state(1 + cfg.bins) == 1.0);
  for (std::size_t t = 1; t < log.records.size(); ++t)
    CHECK(log.records[t].reward ==
          log.records[t].metrics.weighted - log.records[t - 1].metrics.weighted);

  // each logged action replays onto the next snapshot
  for (std::size_t t = 0; t + 1 < log.records.size(); ++t) {
    SamplingDistribution d = uniform_distribution(cfg.bins);
    d.weights = log.records[t].dist_weights;
    const SamplingDistribution next =
        apply_action(d, log.records[t].action, cfg.action_multiplier);
    CHECK(next.weights == log.records[t + 1].dist_weights);
  }

  CHECK(log.final_test.recall.count(1) == 1);
  CHECK(log.final_test.recall.count(2) == 1);
}

TEST_CASE("fixed-seed episodes replay identically") {
  const DataBundle data = tiny_bundle(5);
  const AsrConfig cfg = tiny_config();
  const RunLog a = run_episode(cfg, data.train, data.val, data.test);
  const RunLog b = run_episode(cfg, data.train, data.val, data.test);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t t = 0; t < a.records.size(); ++t) {
    CHECK(a.records[t].reward == b.records[t].reward);
    CHECK(a.records[t].action.code == b.records[t].action.code);
    CHECK(a.records[t].dist_weights == b.records[t].dist_weights);
    CHECK((a.records[t].state.array() == b.records[t].state.array()).all());
    CHECK(reports_equal(a.records[t].metrics, b.records[t].metrics));
  }
  CHECK(reports_equal(a.final_test, b.final_test));
}

TEST_CASE("heuristic samplers leave the distribution untouched") {
  const DataBundle data = tiny_bundle(7);
  AsrConfig cfg = tiny_config();
  cfg.sampler = SamplerKind::random;
  const RunLog log = run_episode(cfg, data.train, data.val, data.test);

  InitialDistributionSpec init = cfg.init;
  init.embed_dim = cfg.embed_dim;
  const SamplingDistribution start = init_distribution(init, cfg.bins);
  for (const EvalRecord& rec : log.records) {
    CHECK(rec.action.code == 0);
    CHECK(rec.dist_weights == start.weights);
  }
  for (std::size_t t = 1; t < log.records.size(); ++t)
    CHECK(log.records[t].reward ==
          log.records[t].metrics.weighted - log.records[t - 1].metrics.weighted);
}

TEST_CASE("every sampler kind completes a short episode") {
  const DataBundle data = tiny_bundle(9);
  for (SamplerKind kind : {SamplerKind::semihard, SamplerKind::distance,
                           SamplerKind::asr_reinforce}) {
    AsrConfig cfg = tiny_config();
    cfg.sampler = kind;
    cfg.epochs = 1;
    cfg.inner_iters = 2;
    const RunLog log = run_episode(cfg, data.train, data.val, data.test);
    CHECK(log.records.size() == 3);
  }
}

TEST_CASE("a bare scalar state drops the distribution summary") {
  const DataBundle data = tiny_bundle(13);
  AsrConfig cfg = tiny_config();
  cfg.augmented_state = false;
  cfg.epochs = 1;
  const RunLog log = run_episode(cfg, data.train, data.val, data.test);
  for (const EvalRecord& rec : log.records) {
    CHECK(rec.state.size() == 1);
    CHECK(rec.state(0) == rec.metrics.weighted);
  }
}

TEST_CASE("episodes validate their configuration and data") {
  const DataBundle data = tiny_bundle(1);
  AsrConfig cfg = tiny_config();
  cfg.epochs = 0;
  CHECK_THROWS_AS(run_episode(cfg, data.train, data.val, data.test),
                  std::invalid_argument);
  cfg = tiny_config();
  cfg.inner_iters = 0;
  CHECK_THROWS_AS(run_episode(cfg, data.train, data.val, data.test),
                  std::invalid_argument);
  cfg = tiny_config();
  LabeledDataset broken = data.train;
  broken.labels.pop_back();
  CHECK_THROWS_AS(run_episode(cfg, broken, data.val, data.test),
                  std::invalid_argument);
}

TEST_CASE("dip detection requires both a deep drop and a recovery") {
  const auto hit = detect_gravity_well({0.5, 0.2, 0.6}, 0.1);
  REQUIRE(hit.has_value());
  CHECK(hit->first == 1);
  CHECK(hit->second == doctest::Approx(0.3));

  // ties resolve to the earliest minimum
  const auto tied = detect_gravity_well({0.5, 0.2, 0.2, 0.6}, 0.1);
  REQUIRE(tied.has_value());
  CHECK(tied->first == 1);

  CHECK(!detect_gravity_well({0.5, 0.45, 0.6}, 0.1).has_value());
  CHECK(!detect_gravity_well({0.5, 0.2, 0.25}, 0.1).has_value());
  CHECK(!detect_gravity_well({0.1, 0.2, 0.3}, 0.1).has_value());
  CHECK(!detect_gravity_well({0.5, 0.4, 0.1}, 0.1).has_value());

  CHECK_THROWS_AS(detect_gravity_well({0.5, 0.2}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(detect_gravity_well({0.5, 0.2, 0.6}, 0.0), std::invalid_argument);
}

TEST_CASE("metric lookup and best-step selection") {
  MetricReport report;
  report.recall = {{1, 0.4}, {4, 0.9}};
  report.nmi = 0.3;
  report.f1 = 0.2;
  report.weighted = 0.35;
  CHECK(metric_value(report, "recall@4") == 0.9);
  CHECK(metric_value(report, "nmi") == 0.3);
  CHECK(metric_value(report, "f1") == 0.2);
  CHECK(metric_value(report, "weighted") == 0.35);
  CHECK_THROWS_AS(metric_value(report, "recall@2"), std::invalid_argument);
  CHECK_THROWS_AS(metric_value(report, "accuracy"), std::invalid_argument);

  RunLog log;
  const double values[] = {0.1, 0.5, 0.5, 0.3};
  for (double v : values) {
    EvalRecord rec;
    rec.metrics.weighted = v;
    log.records.push_back(rec);
  }
  CHECK(best_eval_index(log, "weighted") == 1);
  RunLog empty;
  CHECK_THROWS_AS(best_eval_index(empty, "weighted"), std::invalid_argument);
}

TEST_CASE("short adaptive runs improve validation recall on most seeds") {
  int improved = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    BlobSpec spec;
    spec.num_classes = 2;
    spec.points_per_class = 60;
    spec.dim = 10;
    spec.spread = 1.6;
    spec.seed = seed + 1;
    const LabeledDataset data = gen_gaussian_blobs(spec);
    const TrainValSplit tv = split_train_val(data, SplitSpec{0.25, seed});

    AsrConfig cfg;
    cfg.loss = LossKind::triplet;
    cfg.epochs = 5;
    cfg.inner_iters = 2;
    cfg.recall_ks = {1, 2};
    cfg.batch_size = 16;
    cfg.encoder_lr = 3e-3;
    cfg.seed = seed;
    const RunLog log = run_episode(cfg, tv.train, tv.val, tv.val);
    if (log.records.back().metrics.recall.at(1) >
        log.records.front().metrics.recall.at(1))
      ++improved;
  }
  CHECK(improved >= 9);
}

TEST_CASE("strategy comparison groups metrics and sorts by mean") {
  const DataBundle data = tiny_bundle(17);
  AsrConfig base = tiny_config();
  base.epochs = 1;
  base.inner_iters = 2;
  base.recall_ks = {1};
  AsrConfig other = base;
  base.sampler = SamplerKind::random;
  other.sampler = SamplerKind::semihard;

  const auto rows = compare_strategies({base, other}, {0, 1}, data);
  REQUIRE(rows.size() == 8);
  const std::vector<std::string> expected_metrics = {"recall@1", "nmi", "f1",
                                                     "weighted"};
  for (std::size_t g = 0; g < expected_metrics.size(); ++g) {
    const StrategySummaryRow& first = rows[2 * g];
    const StrategySummaryRow& second = rows[2 * g + 1];
    CHECK(first.metric == expected_metrics[g]);
    CHECK(second.metric == expected_metrics[g]);
    CHECK(first.mean >= second.mean);
    for (const StrategySummaryRow* row : {&first, &second}) {
      CHECK(row->n_seeds == 2);
      CHECK(row->stddev >= 0.0);
      CHECK(row->loss == "triplet");
    }
  }

  CHECK_THROWS_AS(compare_strategies({}, {0, 1}, data), std::invalid_argument);
  CHECK_THROWS_AS(compare_strategies({base}, {0}, data), std::invalid_argument);
}
