#include "asrlab/experiment_config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace asrlab {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("config key " + key + ": expected integer, got '" + value + "'");
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("config key " + key + ": expected number, got '" + value + "'");
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config key " + key + ": expected true/false, got '" + value + "'");
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos == value.size()) return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
  }
  throw ConfigError("config key " + key + ": expected unsigned integer, got '" + value + "'");
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& key, const std::string& value, F item) {
  std::vector<T> out;
  std::istringstream ss(value);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(item(key, trim(tok)));
  if (out.empty()) throw ConfigError("config key " + key + ": empty list");
  return out;
}

}  // namespace

// Benchmark document: an 8-class, 20-dim blob task where reward-guided
// sampling separates from the static baselines within 10 epochs.
ExperimentConfig default_experiment_config() {
  ExperimentConfig cfg;
  cfg.run.loss = LossKind::margin;
  cfg.run.init.kind = InitKind::uniform_high;
  cfg.run.epochs = 10;
  cfg.run.inner_iters = 6;
  cfg.run.encoder_lr = 3e-3;
  cfg.run.margin.beta_lr = 5e-3;
  return cfg;
}

void apply_override(ExperimentConfig& cfg, const std::string& key,
                    const std::string& value) {
  try {
    if (key == "loss") {
      cfg.run.loss = loss_kind_from_string(value);
    } else if (key == "sampler") {
      cfg.run.sampler = sampler_kind_from_string(value);
    } else if (key == "init.kind") {
      cfg.run.init.kind = init_kind_from_string(value);
    } else if (key == "init.mu") {
      cfg.run.init.mu = parse_real(key, value);
    } else if (key == "init.sigma") {
      cfg.run.init.sigma = parse_real(key, value);
    } else if (key == "init.seed") {
      cfg.run.init.seed = parse_u64(key, value);
    } else if (key == "epochs") {
      cfg.run.epochs = parse_int(key, value);
    } else if (key == "inner_iters") {
      cfg.run.inner_iters = parse_int(key, value);
    } else if (key == "batch_size") {
      cfg.run.batch_size = parse_int(key, value);
    } else if (key == "bins") {
      cfg.run.bins = parse_int(key, value);
    } else if (key == "action_multiplier") {
      cfg.run.action_multiplier = parse_real(key, value);
    } else if (key == "recall_ks") {
      cfg.run.recall_ks = parse_list<int>(key, value, parse_int);
    } else if (key.rfind("weights.", 0) == 0) {
      const std::string metric = key.substr(8);
      if (metric != "nmi" && metric != "f1" && metric.rfind("recall@", 0) != 0)
        throw ConfigError("config key " + key + ": unknown metric " + metric);
      cfg.run.metric_weights[metric] = parse_real(key, value);
    } else if (key == "policy.lr") {
      cfg.run.policy.lr = parse_real(key, value);
    } else if (key == "policy.clip_epsilon") {
      cfg.run.policy.clip_epsilon = parse_real(key, value);
    } else if (key == "policy.ppo_epochs") {
      cfg.run.policy.ppo_epochs = parse_int(key, value);
    } else if (key == "policy.eta") {
      cfg.run.policy.eta = parse_real(key, value);
    } else if (key == "policy.baseline") {
      cfg.run.policy.baseline = parse_bool(key, value);
    } else if (key == "policy.old_sync_interval") {
      cfg.run.policy.old_sync_interval = parse_int(key, value);
    } else if (key == "policy.hidden") {
      cfg.run.policy_hidden = parse_int(key, value);
    } else if (key == "augmented_state") {
      cfg.run.augmented_state = parse_bool(key, value);
    } else if (key == "encoder.hidden") {
      cfg.run.encoder_hidden = parse_int(key, value);
    } else if (key == "encoder.embed_dim") {
      cfg.run.embed_dim = parse_int(key, value);
    } else if (key == "encoder.lr") {
      cfg.run.encoder_lr = parse_real(key, value);
    } else if (key == "gamma") {
      cfg.run.gamma = parse_real(key, value);
    } else if (key == "margin.beta") {
      cfg.run.margin.beta = parse_real(key, value);
    } else if (key == "margin.beta_lr") {
      cfg.run.margin.beta_lr = parse_real(key, value);
    } else if (key == "margin.mean_reduction") {
      cfg.run.margin_mean_reduction = parse_bool(key, value);
    } else if (key == "data.classes") {
      cfg.data.num_classes = parse_int(key, value);
    } else if (key == "data.per_class") {
      cfg.data.points_per_class = parse_int(key, value);
    } else if (key == "data.dim") {
      cfg.data.dim = parse_int(key, value);
    } else if (key == "data.spread") {
      cfg.data.spread = parse_real(key, value);
    } else if (key == "data.seed") {
      cfg.data.seed = parse_u64(key, value);
    } else if (key == "data.csv") {
      cfg.data_csv = value;
    } else if (key == "data.csv_header") {
      cfg.data_csv_header = parse_bool(key, value);
    } else if (key == "data.val_fraction") {
      cfg.val_fraction = parse_real(key, value);
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "seeds") {
      cfg.seeds = parse_list<std::uint64_t>(key, value, parse_u64);
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config key " + key + ": " + e.what());
  }
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  ExperimentConfig cfg = default_experiment_config();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + " line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty())
      throw ConfigError(path + " line " + std::to_string(line_no) + ": empty key");
    try {
      apply_override(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(path + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

DataBundle build_data(const ExperimentConfig& cfg) {
  LabeledDataset full = cfg.data_csv.empty()
                            ? gen_gaussian_blobs(cfg.data)
                            : load_csv(cfg.data_csv, cfg.data_csv_header);
  const ClassSplit halves = split_by_class_half(full);
  const TrainValSplit tv =
      split_train_val(halves.train, SplitSpec{cfg.val_fraction, cfg.data.seed});
  DataBundle bundle;
  bundle.train = tv.train;
  bundle.val = tv.val;
  bundle.test = halves.test;
  return bundle;
}

}  // namespace asrlab
