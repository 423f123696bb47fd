#include "asrlab/asr_loop.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "asrlab/encoder.hpp"
#include "asrlab/random.hpp"

namespace asrlab {
namespace {

Eigen::VectorXd build_state(double weighted, const SamplingDistribution& dist,
                            double epoch_frac, bool augmented) {
  if (!augmented) {
    Eigen::VectorXd s(1);
    s(0) = weighted;
    return s;
  }
  Eigen::VectorXd s(2 + dist.bins());
  s(0) = weighted;
  for (int b = 0; b < dist.bins(); ++b) s(1 + b) = dist.weights[static_cast<std::size_t>(b)];
  s(1 + dist.bins()) = epoch_frac;
  return s;
}

PairBatch pairs_from_triplets(const TripletBatch& triplets) {
  PairBatch pairs;
  pairs.pairs.reserve(triplets.triplets.size() * 2);
  for (const Triplet& t : triplets.triplets) {
    pairs.pairs.push_back(Pair{t.a, t.p, true});
    pairs.pairs.push_back(Pair{t.a, t.n, false});
  }
  return pairs;
}

}  // namespace

const char* to_string(LossKind kind) {
  switch (kind) {
    case LossKind::contrastive: return "contrastive";
    case LossKind::triplet: return "triplet";
    case LossKind::margin: return "margin";
  }
  throw std::invalid_argument("to_string: bad LossKind");
}

const char* to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::random: return "random";
    case SamplerKind::semihard: return "semihard";
    case SamplerKind::distance: return "distance";
    case SamplerKind::asr_reinforce: return "asr_reinforce";
    case SamplerKind::asr_ppo: return "asr_ppo";
  }
  throw std::invalid_argument("to_string: bad SamplerKind");
}

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "contrastive") return LossKind::contrastive;
  if (name == "triplet") return LossKind::triplet;
  if (name == "margin") return LossKind::margin;
  throw std::invalid_argument("unknown loss kind: " + name);
}

SamplerKind sampler_kind_from_string(const std::string& name) {
  if (name == "random") return SamplerKind::random;
  if (name == "semihard") return SamplerKind::semihard;
  if (name == "distance") return SamplerKind::distance;
  if (name == "asr_reinforce") return SamplerKind::asr_reinforce;
  if (name == "asr_ppo") return SamplerKind::asr_ppo;
  throw std::invalid_argument("unknown sampler kind: " + name);
}

double loss_gamma(const AsrConfig& cfg) {
  if (cfg.gamma > 0.0) return cfg.gamma;
  return cfg.loss == LossKind::contrastive ? 1.0 : 0.2;
}

std::vector<int> make_balanced_batch(const std::vector<std::vector<int>>& rows_by_class,
                                     int batch_size, std::mt19937_64& rng) {
  const int C = static_cast<int>(rows_by_class.size());
  if (C < 1) throw std::invalid_argument("make_balanced_batch: no classes");
  if (batch_size < 2) throw std::invalid_argument("make_balanced_batch: batch too small");
  const int K = std::max(2, batch_size / C);
  const int P = std::min(C, std::max(2, batch_size / K));

  std::vector<int> class_order(static_cast<std::size_t>(C));
  for (int c = 0; c < C; ++c) class_order[static_cast<std::size_t>(c)] = c;
  std::shuffle(class_order.begin(), class_order.end(), rng);

  std::vector<int> batch;
  for (int ci = 0; ci < std::min(P, C); ++ci) {
    std::vector<int> rows = rows_by_class[static_cast<std::size_t>(class_order[static_cast<std::size_t>(ci)])];
    std::shuffle(rows.begin(), rows.end(), rng);
    const int take = std::min<int>(K, static_cast<int>(rows.size()));
    batch.insert(batch.end(), rows.begin(), rows.begin() + take);
  }
  return batch;
}

int iters_per_epoch(int n_train, int batch_size) {
  if (n_train < 1 || batch_size < 1)
    throw std::invalid_argument("iters_per_epoch: sizes must be positive");
  return (n_train + batch_size - 1) / batch_size;
}

RunLog run_episode(const AsrConfig& cfg, const LabeledDataset& train,
                   const LabeledDataset& val, const LabeledDataset& test) {
  if (cfg.epochs < 1) throw std::invalid_argument("run_episode: epochs must be >= 1");
  if (cfg.inner_iters < 1)
    throw std::invalid_argument("run_episode: inner_iters must be >= 1");
  train.validate();
  val.validate();
  test.validate();

  const std::uint64_t seed = cfg.seed;
  std::mt19937_64 rng_train(derive_seed(seed, "train"));
  std::mt19937_64 rng_policy(derive_seed(seed, "policy"));

  EncoderParams encoder = init_encoder(train.dim(), cfg.encoder_hidden,
                                       cfg.embed_dim, derive_seed(seed, "encoder_init"));

  InitialDistributionSpec init = cfg.init;
  init.embed_dim = cfg.embed_dim;
  if (init.seed == 0) init.seed = derive_seed(seed, "init_distribution");
  SamplingDistribution dist = init_distribution(init, cfg.bins);

  const bool is_asr = cfg.sampler == SamplerKind::asr_reinforce ||
                      cfg.sampler == SamplerKind::asr_ppo;
  const int state_dim = cfg.augmented_state ? 2 + cfg.bins : 1;
  PolicyParams policy = init_policy(state_dim, cfg.policy_hidden,
                                    action_count(cfg.bins),
                                    derive_seed(seed, "policy_init"));
  PolicyParams old_policy = policy;
  TrajectoryBuffer buffer;
  buffer.eta = cfg.policy.eta;
  int ppo_calls = 0;

  TripletSamplerContext ctx;
  ctx.gamma = loss_gamma(cfg);
  ctx.bins = cfg.bins;
  switch (cfg.sampler) {
    case SamplerKind::random: ctx.strategy = NegativeStrategy::random; break;
    case SamplerKind::semihard: ctx.strategy = NegativeStrategy::semihard; break;
    case SamplerKind::distance: ctx.strategy = NegativeStrategy::distance; break;
    case SamplerKind::asr_reinforce:
    case SamplerKind::asr_ppo:
      ctx.strategy = NegativeStrategy::binned;
      ctx.dist = &dist;
      break;
  }

  std::vector<std::vector<int>> rows_by_class(
      static_cast<std::size_t>(train.num_classes()));
  for (int i = 0; i < train.size(); ++i)
    rows_by_class[static_cast<std::size_t>(train.labels[static_cast<std::size_t>(i)])]
        .push_back(i);

  const int total_iters = cfg.epochs * iters_per_epoch(train.size(), cfg.batch_size);
  const std::uint64_t eval_seed = derive_seed(seed, "eval_kmeans");
  MarginState margin = cfg.margin;

  auto evaluate_val = [&]() {
    const EmbeddingBatch emb = embed_forward(encoder, val.features);
    return evaluate_embeddings(emb, val.labels, cfg.recall_ks, cfg.metric_weights,
                               eval_seed);
  };

  RunLog log;
  log.config = cfg;
  log.seed = seed;

  // one policy step per evaluated block; evaluation never touches the
  // training or policy random streams
  int iters_done = 0;
  double m_prev = 0.0;
  Transition pending;
  bool has_pending = false;
  const int num_steps = (total_iters + cfg.inner_iters - 1) / cfg.inner_iters;

  for (int step = 0; step <= num_steps; ++step) {
    if (step > 0) {
      const int block = std::min(cfg.inner_iters, total_iters - iters_done);
      for (int it = 0; it < block; ++it) {
        const std::vector<int> batch_rows =
            make_balanced_batch(rows_by_class, cfg.batch_size, rng_train);
        Eigen::MatrixXd X(static_cast<Eigen::Index>(batch_rows.size()), train.dim());
        std::vector<int> batch_labels(batch_rows.size());
        std::vector<int> positions(batch_rows.size());
        for (std::size_t i = 0; i < batch_rows.size(); ++i) {
          X.row(static_cast<Eigen::Index>(i)) = train.features.row(batch_rows[i]);
          batch_labels[i] = train.labels[static_cast<std::size_t>(batch_rows[i])];
          positions[i] = static_cast<int>(i);
        }
        const EmbeddingBatch emb = embed_forward(encoder, X);
        const TripletBatch triplets =
            build_triplets(positions, batch_labels, emb, ctx, rng_train);

        LossReport report;
        switch (cfg.loss) {
          case LossKind::triplet:
            report = triplet_loss(emb, triplets, ctx.gamma);
            break;
          case LossKind::contrastive:
            report = contrastive_loss(emb, pairs_from_triplets(triplets), ctx.gamma);
            break;
          case LossKind::margin:
            report = margin_loss(emb, pairs_from_triplets(triplets), ctx.gamma,
                                 margin, cfg.margin_mean_reduction);
            break;
        }
        if (!std::isfinite(report.value))
          throw std::runtime_error("run_episode: non-finite loss at iteration " +
                                   std::to_string(iters_done));
        const EncoderGrads grads = embed_backward(emb, report.grad_embeddings, encoder);
        optimizer_step(encoder, grads, cfg.encoder_lr);
        if (cfg.loss == LossKind::margin) update_beta(margin, report.grad_beta);
        ++iters_done;
      }
    }

    const MetricReport metrics = evaluate_val();
    const double m = metrics.weighted;
    const double reward = step == 0 ? 0.0 : m - m_prev;
    m_prev = m;

    const double epoch_frac =
        static_cast<double>(iters_done) / static_cast<double>(total_iters);
    const Eigen::VectorXd state =
        build_state(m, dist, epoch_frac, cfg.augmented_state);
    const std::vector<double> snapshot = dist.weights;

    ActionId action{0};
    if (is_asr) {
      if (has_pending) {
        pending.reward = reward;
        buffer.transitions.push_back(pending);
        if (cfg.sampler == SamplerKind::asr_reinforce) {
          reinforce_update(policy, buffer, cfg.policy);
        } else {
          ++ppo_calls;
          const bool sync = cfg.policy.old_sync_interval > 0 &&
                            ppo_calls % cfg.policy.old_sync_interval == 0;
          ppo_update(policy, old_policy, buffer, cfg.policy, sync);
        }
      }
      const Eigen::VectorXd probs = policy_forward(policy, state);
      const auto [a, logp] = sample_action(probs, rng_policy);
      action = a;
      dist = apply_action(dist, action, cfg.action_multiplier);
      pending = Transition{state, action, logp, 0.0};
      has_pending = true;
    }

    EvalRecord record;
    record.step = step;
    record.metrics = metrics;
    record.state = state;
    record.action = action;
    record.reward = reward;
    record.dist_weights = snapshot;
    log.records.push_back(std::move(record));
  }

  const EmbeddingBatch test_emb = embed_forward(encoder, test.features);
  log.final_test = evaluate_embeddings(test_emb, test.labels, cfg.recall_ks,
                                       cfg.metric_weights,
                                       derive_seed(seed, "test_kmeans"));
  return log;
}

std::optional<std::pair<int, double>> detect_gravity_well(
    const std::vector<double>& trajectory, double delta) {
  if (trajectory.size() < 3)
    throw std::invalid_argument("detect_gravity_well: need at least 3 points");
  if (delta <= 0.0) throw std::invalid_argument("detect_gravity_well: delta must be positive");
  std::size_t t_min = 0;
  for (std::size_t t = 1; t < trajectory.size(); ++t)
    if (trajectory[t] < trajectory[t_min]) t_min = t;
  if (!(trajectory[t_min] < trajectory[0] - delta)) return std::nullopt;
  double recover = -std::numeric_limits<double>::infinity();
  for (std::size_t t = t_min + 1; t < trajectory.size(); ++t)
    recover = std::max(recover, trajectory[t]);
  if (!(recover > trajectory[t_min] + delta)) return std::nullopt;
  return std::make_pair(static_cast<int>(t_min), trajectory[0] - trajectory[t_min]);
}

double metric_value(const MetricReport& report, const std::string& name) {
  if (name == "nmi") return report.nmi;
  if (name == "f1") return report.f1;
  if (name == "weighted") return report.weighted;
  if (name.rfind("recall@", 0) == 0) {
    const int k = std::stoi(name.substr(7));
    const auto it = report.recall.find(k);
    if (it != report.recall.end()) return it->second;
    throw std::invalid_argument("metric_value: recall@" + std::to_string(k) +
                                " not present");
  }
  throw std::invalid_argument("metric_value: unknown metric " + name);
}

int best_eval_index(const RunLog& log, const std::string& metric) {
  if (log.records.empty()) throw std::invalid_argument("best_eval_index: empty log");
  int best = 0;
  double best_value = metric_value(log.records[0].metrics, metric);
  for (std::size_t i = 1; i < log.records.size(); ++i) {
    const double v = metric_value(log.records[i].metrics, metric);
    if (v > best_value) {
      best_value = v;
      best = static_cast<int>(i);
    }
  }
  return best;
}

std::vector<StrategySummaryRow> compare_strategies(const std::vector<AsrConfig>& cfgs,
                                                   const std::vector<std::uint64_t>& seeds,
                                                   const DataBundle& data) {
  if (cfgs.empty()) throw std::invalid_argument("compare_strategies: no configs");
  if (seeds.size() < 2) throw std::invalid_argument("compare_strategies: need >= 2 seeds");

  std::vector<std::vector<MetricReport>> finals(cfgs.size());
  for (std::size_t ci = 0; ci < cfgs.size(); ++ci) {
    for (const std::uint64_t seed : seeds) {
      AsrConfig cfg = cfgs[ci];
      cfg.seed = seed;
      try {
        finals[ci].push_back(run_episode(cfg, data.train, data.val, data.test).final_test);
      } catch (const std::exception& e) {
        throw std::runtime_error(std::string("compare_strategies: ") +
                                 to_string(cfg.sampler) + "+" + to_string(cfg.loss) +
                                 " seed " + std::to_string(seed) + ": " + e.what());
      }
    }
  }

  std::vector<std::string> metric_names;
  for (int k : cfgs.front().recall_ks)
    metric_names.push_back("recall@" + std::to_string(k));
  metric_names.emplace_back("nmi");
  metric_names.emplace_back("f1");
  metric_names.emplace_back("weighted");

  std::vector<StrategySummaryRow> rows;
  for (const std::string& metric : metric_names) {
    std::vector<StrategySummaryRow> group;
    for (std::size_t ci = 0; ci < cfgs.size(); ++ci) {
      StrategySummaryRow row;
      row.strategy = to_string(cfgs[ci].sampler);
      row.loss = to_string(cfgs[ci].loss);
      row.metric = metric;
      row.n_seeds = static_cast<int>(seeds.size());
      double mean = 0.0;
      for (const MetricReport& r : finals[ci]) mean += metric_value(r, metric);
      mean /= static_cast<double>(finals[ci].size());
      double var = 0.0;
      for (const MetricReport& r : finals[ci]) {
        const double d = metric_value(r, metric) - mean;
        var += d * d;
      }
      var /= static_cast<double>(finals[ci].size() - 1);
      row.mean = mean;
      row.stddev = std::sqrt(var);
      group.push_back(row);
    }
    std::stable_sort(group.begin(), group.end(),
                     [](const StrategySummaryRow& a, const StrategySummaryRow& b) {
                       return a.mean > b.mean;
                     });
    rows.insert(rows.end(), group.begin(), group.end());
  }
  return rows;
}

}  // namespace asrlab
