#include "commands.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "asrlab/asr_loop.hpp"
#include "asrlab/checkpoint.hpp"
#include "asrlab/experiment_config.hpp"
#include "asrlab/random.hpp"
#include "asrlab/run_io.hpp"

namespace asrlab::cli {
namespace {

namespace fs = std::filesystem;

int guard(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

ExperimentConfig make_config(const CommonOptions& opts) {
  ExperimentConfig cfg = opts.config_path.empty()
                             ? default_experiment_config()
                             : load_experiment_config(opts.config_path);
  for (const auto& [key, value] : opts.overrides) apply_override(cfg, key, value);
  if (opts.seed) cfg.seeds = {*opts.seed};
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (cfg.seeds.empty()) throw ConfigError("seed list is empty");
  return cfg;
}

unsigned worker_count(std::size_t jobs) {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("ASR_LAB_THREADS")) {
    try {
      std::size_t pos = 0;
      const unsigned long v = std::stoul(env, &pos);
      if (pos != std::string(env).size() || v == 0) throw std::invalid_argument(env);
      n = static_cast<unsigned>(v);
    } catch (const std::exception&) {
      throw ConfigError("ASR_LAB_THREADS must be a positive integer");
    }
  }
  return std::min<std::size_t>(n, jobs) > 0
             ? static_cast<unsigned>(std::min<std::size_t>(n, jobs))
             : 1u;
}

// Runs fn(0..n-1) across workers; results must be written to per-index slots.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = worker_count(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<double> parse_number_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError(std::string(what) + ": bad number '" + tok + "'");
    }
  }
  if (out.empty()) throw ConfigError(std::string(what) + ": empty list");
  return out;
}

std::string run_log_path(const std::string& out_dir, std::uint64_t seed) {
  return out_dir + "/run_s" + std::to_string(seed) + ".jsonl";
}

std::string summary_path(const std::string& out_dir, std::uint64_t seed) {
  return out_dir + "/summary_s" + std::to_string(seed) + ".json";
}

}  // namespace

int cmd_train(const CommonOptions& opts) {
  return guard([&]() {
    const ExperimentConfig cfg = make_config(opts);
    const DataBundle data = build_data(cfg);
    fs::create_directories(cfg.out_dir);

    std::vector<RunLog> logs(cfg.seeds.size());
    parallel_for(cfg.seeds.size(), [&](std::size_t i) {
      AsrConfig run = cfg.run;
      run.seed = cfg.seeds[i];
      logs[i] = run_episode(run, data.train, data.val, data.test);
    });

    for (std::size_t i = 0; i < logs.size(); ++i) {
      const std::uint64_t seed = cfg.seeds[i];
      const std::string log_path = run_log_path(cfg.out_dir, seed);
      const std::string sum_path = summary_path(cfg.out_dir, seed);
      write_run_jsonl(logs[i], log_path);
      write_run_summary(logs[i], sum_path);
      validate_run_jsonl(log_path);
      validate_run_summary(sum_path);
      std::cout << "seed " << seed << ": val weighted "
                << logs[i].records.back().metrics.weighted << ", test recall@1 "
                << logs[i].final_test.recall.at(1) << ", test nmi "
                << logs[i].final_test.nmi << "\n";
    }
  });
}

int cmd_ablate_init(const CommonOptions& opts, double dip_delta) {
  return guard([&]() {
    const ExperimentConfig cfg = make_config(opts);
    if (dip_delta <= 0.0) throw ConfigError("dip delta must be positive");
    const DataBundle data = build_data(cfg);
    fs::create_directories(cfg.out_dir);

    const std::vector<InitKind> kinds = {InitKind::uniform_low, InitKind::uniform_high,
                                         InitKind::distance,    InitKind::random,
                                         InitKind::normal_high, InitKind::normal_low};
    const std::size_t S = cfg.seeds.size();
    std::vector<RunLog> logs(kinds.size() * S);
    parallel_for(logs.size(), [&](std::size_t i) {
      AsrConfig run = cfg.run;
      run.init = InitialDistributionSpec{};
      run.init.kind = kinds[i / S];
      run.seed = cfg.seeds[i % S];
      logs[i] = run_episode(run, data.train, data.val, data.test);
    });

    std::vector<InitAblationResult> results;
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      InitAblationResult result;
      result.init_name = to_string(kinds[k]);
      result.seeds = cfg.seeds;
      int dips = 0;
      for (std::size_t s = 0; s < S; ++s) {
        const RunLog& log = logs[k * S + s];
        std::vector<double> traj;
        traj.reserve(log.records.size());
        for (const EvalRecord& r : log.records) traj.push_back(r.metrics.weighted);
        const auto dip = detect_gravity_well(traj, dip_delta);
        if (dip) ++dips;
        result.trajectories.push_back(std::move(traj));
        result.dips.push_back(dip);
      }
      result.dip_rate = static_cast<double>(dips) / static_cast<double>(S);
      results.push_back(std::move(result));
    }

    const std::string summary = cfg.out_dir + "/ablation_summary.json";
    write_ablation_summary(results, summary);
    validate_ablation_summary(summary);
    for (const InitAblationResult& r : results) {
      const std::string path = cfg.out_dir + "/trajectories_" + r.init_name + ".csv";
      write_trajectories_csv(r, path);
      validate_trajectories_csv(path);
      std::cout << r.init_name << ": dip rate " << r.dip_rate << "\n";
    }
  });
}

int cmd_compare(const CommonOptions& opts) {
  return guard([&]() {
    const ExperimentConfig cfg = make_config(opts);
    if (cfg.seeds.size() < 2)
      throw ConfigError("compare needs at least 2 seeds");
    const DataBundle data = build_data(cfg);
    fs::create_directories(cfg.out_dir);

    std::vector<AsrConfig> cfgs;
    for (const SamplerKind sampler :
         {SamplerKind::random, SamplerKind::semihard, SamplerKind::distance,
          SamplerKind::asr_reinforce, SamplerKind::asr_ppo}) {
      for (const LossKind loss : {LossKind::triplet, LossKind::margin}) {
        AsrConfig run = cfg.run;
        run.sampler = sampler;
        run.loss = loss;
        cfgs.push_back(run);
      }
    }

    const std::vector<StrategySummaryRow> rows =
        compare_strategies(cfgs, cfg.seeds, data);
    const std::string path = cfg.out_dir + "/compare.csv";
    write_compare_csv(rows, path);
    validate_compare_csv(path);

    for (const StrategySummaryRow& row : rows)
      if (row.metric == "recall@1")
        std::cout << row.strategy << "+" << row.loss << " recall@1 " << row.mean
                  << " (std " << row.stddev << ", n " << row.n_seeds << ")\n";
  });
}

int cmd_bandit(const BanditOptions& opts) {
  return guard([&]() {
    const std::vector<double> rewards = parse_number_list(opts.rewards, "--rewards");
    std::vector<double> logits(rewards.size(), 0.0);
    if (!opts.init_logits.empty()) {
      logits = parse_number_list(opts.init_logits, "--init-logits");
      if (logits.size() != rewards.size())
        throw ConfigError("--init-logits length must match --rewards");
    }
    if (opts.steps < 1) throw ConfigError("--steps must be >= 1");
    if (opts.lr <= 0.0) throw ConfigError("--lr must be positive");

    const std::vector<Eigen::VectorXd> trajectory =
        run_softmax_bandit(rewards, logits, opts.steps, opts.lr);
    fs::create_directories(opts.out_dir);
    const std::string csv = opts.out_dir + "/bandit_trajectory.csv";
    const std::string summary = opts.out_dir + "/bandit_summary.json";
    write_bandit_csv(trajectory, csv);
    write_bandit_summary(trajectory, rewards, logits, opts.lr, summary);
    validate_bandit_csv(csv);
    validate_bandit_summary(summary);

    int optimal = 0;
    for (std::size_t i = 1; i < rewards.size(); ++i)
      if (rewards[i] > rewards[static_cast<std::size_t>(optimal)])
        optimal = static_cast<int>(i);
    std::cout << "optimal action " << optimal << ", escape steps "
              << escape_steps(trajectory, optimal) << "\n";
  });
}

int cmd_eval(const CommonOptions& opts, const std::string& checkpoint_path) {
  return guard([&]() {
    const ExperimentConfig cfg = make_config(opts);
    const DataBundle data = build_data(cfg);
    fs::create_directories(cfg.out_dir);

    const EncoderParams encoder = load_encoder_checkpoint(checkpoint_path);
    const EmbeddingBatch emb = embed_forward(encoder, data.test.features);
    const MetricReport report =
        evaluate_embeddings(emb, data.test.labels, cfg.run.recall_ks,
                            cfg.run.metric_weights,
                            derive_seed(cfg.seeds.front(), "test_kmeans"));
    const std::string path = cfg.out_dir + "/eval_metrics.json";
    write_metrics_json(report, path);
    validate_metrics_json(path);
    std::cout << "test recall@1 " << report.recall.at(1) << ", nmi " << report.nmi
              << ", f1 " << report.f1 << ", weighted " << report.weighted << "\n";
  });
}

}  // namespace asrlab::cli
