#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "asrlab/dataset.hpp"
#include "asrlab/losses.hpp"
#include "asrlab/metrics.hpp"
#include "asrlab/rl.hpp"
#include "asrlab/samplers.hpp"

namespace asrlab {

enum class LossKind { contrastive, triplet, margin };
enum class SamplerKind { random, semihard, distance, asr_reinforce, asr_ppo };

const char* to_string(LossKind kind);
const char* to_string(SamplerKind kind);
LossKind loss_kind_from_string(const std::string& name);
SamplerKind sampler_kind_from_string(const std::string& name);

struct AsrConfig {
  LossKind loss = LossKind::triplet;
  SamplerKind sampler = SamplerKind::asr_ppo;
  // init.seed 0 derives from the run seed; init.embed_dim follows embed_dim
  InitialDistributionSpec init;
  int epochs = 40;
  int inner_iters = 20;  // encoder steps per RL step
  int batch_size = 32;
  std::map<std::string, double> metric_weights = default_metric_weights();
  std::vector<int> recall_ks = {1, 2, 4, 8};
  int bins = 10;
  double action_multiplier = 2.0;
  PolicyConfig policy;
  int policy_hidden = 32;
  bool augmented_state = true;  // weighted metric + bin weights + epoch fraction
  int encoder_hidden = 64;
  int embed_dim = 16;
  double encoder_lr = 1e-3;
  double gamma = -1.0;  // loss margin; negative selects the per-loss default
  MarginState margin;
  bool margin_mean_reduction = false;
  std::uint64_t seed = 0;
};

// contrastive 1.0, triplet 0.2, margin 0.2 unless cfg.gamma overrides
double loss_gamma(const AsrConfig& cfg);

// One row per evaluation. state, action, and dist_weights are taken at
// evaluation time, before the recorded action mutates the distribution;
// reward is the weighted-metric delta from the previous evaluation (0 for
// the pre-training record).
struct EvalRecord {
  int step = 0;
  MetricReport metrics;
  Eigen::VectorXd state;
  ActionId action;
  double reward = 0.0;
  std::vector<double> dist_weights;
};

struct RunLog {
  AsrConfig config;
  std::uint64_t seed = 0;
  std::vector<EvalRecord> records;
  MetricReport final_test;
};

// Full episode: blocks of inner_iters encoder updates, each followed by a
// validation evaluation; ASR samplers additionally update the policy and
// adjust the sampling distribution after every evaluation.
RunLog run_episode(const AsrConfig& cfg, const LabeledDataset& train,
                   const LabeledDataset& val, const LabeledDataset& test);

// Class-balanced mini-batch: roughly batch_size/K classes with K rows each,
// drawn without replacement inside a class.
std::vector<int> make_balanced_batch(const std::vector<std::vector<int>>& rows_by_class,
                                     int batch_size, std::mt19937_64& rng);

int iters_per_epoch(int n_train, int batch_size);

// Dip-then-recovery test: global minimum t* qualifies when it sits more than
// delta below the start and some later value recovers more than delta above
// it; returns (t*, start - trajectory[t*]).
std::optional<std::pair<int, double>> detect_gravity_well(
    const std::vector<double>& trajectory, double delta);

double metric_value(const MetricReport& report, const std::string& name);

// First record index attaining the maximum of the named metric.
int best_eval_index(const RunLog& log, const std::string& metric);

struct DataBundle {
  LabeledDataset train;
  LabeledDataset val;
  LabeledDataset test;
};

struct StrategySummaryRow {
  std::string strategy;
  std::string loss;
  std::string metric;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation over seeds
  int n_seeds = 0;
};

// Runs every (config, seed) pair and aggregates final test metrics; rows are
// grouped by metric and sorted by descending mean within each group.
std::vector<StrategySummaryRow> compare_strategies(const std::vector<AsrConfig>& cfgs,
                                                   const std::vector<std::uint64_t>& seeds,
                                                   const DataBundle& data);

}  // namespace asrlab
