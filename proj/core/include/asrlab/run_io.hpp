#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "asrlab/asr_loop.hpp"

namespace asrlab {

// Serialization is deterministic: fixed key order, no timestamps, shortest
// round-trip doubles. Identical logs produce byte-identical files.
void write_run_jsonl(const RunLog& log, const std::string& path);
void write_run_summary(const RunLog& log, const std::string& path);

// Columns: strategy,loss,metric,mean,std,n_seeds.
void write_compare_csv(const std::vector<StrategySummaryRow>& rows,
                       const std::string& path);

// Columns: step,p_0..p_{A-1}; one row per trajectory point.
void write_bandit_csv(const std::vector<Eigen::VectorXd>& trajectory,
                      const std::string& path);

// First trajectory index where the action's probability exceeds threshold,
// -1 if never. Index i is the point after i updates.
int escape_steps(const std::vector<Eigen::VectorXd>& trajectory, int action,
                 double threshold = 0.5);

void write_bandit_summary(const std::vector<Eigen::VectorXd>& trajectory,
                          const std::vector<double>& rewards,
                          const std::vector<double>& init_logits, double lr,
                          const std::string& path);

struct InitAblationResult {
  std::string init_name;
  std::vector<std::uint64_t> seeds;
  // weighted-metric trajectory per seed, one value per evaluation
  std::vector<std::vector<double>> trajectories;
  std::vector<std::optional<std::pair<int, double>>> dips;
  double dip_rate = 0.0;
};

void write_ablation_summary(const std::vector<InitAblationResult>& results,
                            const std::string& path);

// Columns: step,seed_<s0>..seed_<sn>; weighted metric per evaluation.
void write_trajectories_csv(const InitAblationResult& result, const std::string& path);

void write_metrics_json(const MetricReport& report, const std::string& path);

// Schema checks re-read an emitted file and throw std::runtime_error when it
// does not parse or violates its contract.
void validate_run_jsonl(const std::string& path);
void validate_run_summary(const std::string& path);
void validate_compare_csv(const std::string& path);
void validate_bandit_csv(const std::string& path);
void validate_bandit_summary(const std::string& path);
void validate_ablation_summary(const std::string& path);
void validate_trajectories_csv(const std::string& path);
void validate_metrics_json(const std::string& path);

}  // namespace asrlab
