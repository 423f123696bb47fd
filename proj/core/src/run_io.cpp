#include "asrlab/run_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace asrlab {
namespace {

using json = nlohmann::ordered_json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json metrics_to_json(const MetricReport& report) {
  json recall = json::object();
  for (const auto& [k, v] : report.recall) recall[std::to_string(k)] = v;
  return json{{"recall", recall},
              {"nmi", report.nmi},
              {"f1", report.f1},
              {"weighted", report.weighted}};
}

json config_to_json(const AsrConfig& cfg) {
  json weights = json::object();
  for (const auto& [name, w] : cfg.metric_weights) weights[name] = w;
  return json{
      {"loss", to_string(cfg.loss)},
      {"sampler", to_string(cfg.sampler)},
      {"init",
       {{"kind", to_string(cfg.init.kind)},
        {"mu", cfg.init.mu},
        {"sigma", cfg.init.sigma},
        {"seed", cfg.init.seed}}},
      {"epochs", cfg.epochs},
      {"inner_iters", cfg.inner_iters},
      {"batch_size", cfg.batch_size},
      {"metric_weights", weights},
      {"recall_ks", cfg.recall_ks},
      {"bins", cfg.bins},
      {"action_multiplier", cfg.action_multiplier},
      {"policy",
       {{"lr", cfg.policy.lr},
        {"clip_epsilon", cfg.policy.clip_epsilon},
        {"ppo_epochs", cfg.policy.ppo_epochs},
        {"eta", cfg.policy.eta},
        {"baseline", cfg.policy.baseline},
        {"old_sync_interval", cfg.policy.old_sync_interval},
        {"hidden", cfg.policy_hidden}}},
      {"augmented_state", cfg.augmented_state},
      {"encoder",
       {{"hidden", cfg.encoder_hidden},
        {"embed_dim", cfg.embed_dim},
        {"lr", cfg.encoder_lr}}},
      {"gamma", loss_gamma(cfg)},
      {"margin",
       {{"beta", cfg.margin.beta},
        {"beta_lr", cfg.margin.beta_lr},
        {"mean_reduction", cfg.margin_mean_reduction}}},
      {"seed", cfg.seed}};
}

std::vector<double> bin_edges_for(int B) {
  std::vector<double> edges(static_cast<std::size_t>(B) + 1);
  for (int i = 0; i <= B; ++i)
    edges[static_cast<std::size_t>(i)] = 2.0 * static_cast<double>(i) / B;
  return edges;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  return out;
}

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": invalid JSON: " + e.what());
  }
  return j;
}

void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error(path + ": " + what);
}

void check_metrics_json(const json& m, const std::string& path) {
  if (!m.is_object() || !m.contains("recall") || !m.contains("nmi") ||
      !m.contains("f1") || !m.contains("weighted"))
    fail(path, "metrics object missing fields");
  for (const char* field : {"nmi", "f1", "weighted"}) {
    if (!m[field].is_number()) fail(path, std::string("metrics field ") + field + " not a number");
    const double v = m[field].get<double>();
    if (v < 0.0 || v > 1.0) fail(path, std::string("metrics field ") + field + " outside [0,1]");
  }
  if (!m["recall"].is_object() || m["recall"].empty()) fail(path, "recall map empty");
  double prev = -1.0;
  for (const auto& [k, v] : m["recall"].items()) {
    if (!v.is_number()) fail(path, "recall value not a number");
    const double r = v.get<double>();
    if (r < 0.0 || r > 1.0) fail(path, "recall value outside [0,1]");
    if (r < prev) fail(path, "recall not monotone in k");
    prev = r;
  }
}

void check_simplex(const json& weights, const std::string& path) {
  if (!weights.is_array() || weights.empty()) fail(path, "weights not a non-empty array");
  double total = 0.0;
  for (const auto& w : weights) {
    if (!w.is_number()) fail(path, "weight not a number");
    const double v = w.get<double>();
    if (v < 0.0) fail(path, "negative weight");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) fail(path, "weights do not sum to 1");
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_csv_number(const std::string& s, const std::string& path) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw std::runtime_error(path + ": bad number '" + s + "'");
}

}  // namespace

void write_run_jsonl(const RunLog& log, const std::string& path) {
  std::ofstream out = open_out(path);
  const std::vector<double> edges = bin_edges_for(log.config.bins);
  for (const EvalRecord& r : log.records) {
    std::vector<double> state(r.state.data(), r.state.data() + r.state.size());
    const json line{{"step", r.step},
                    {"reward", r.reward},
                    {"action", r.action.code},
                    {"state", state},
                    {"metrics", metrics_to_json(r.metrics)},
                    {"dist", {{"weights", r.dist_weights}, {"bin_edges", edges}}}};
    out << line.dump() << "\n";
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

void write_run_summary(const RunLog& log, const std::string& path) {
  double reward_sum = 0.0;
  for (const EvalRecord& r : log.records) reward_sum += r.reward;
  json best = json::object();
  std::vector<std::string> names;
  for (int k : log.config.recall_ks) names.push_back("recall@" + std::to_string(k));
  names.emplace_back("nmi");
  names.emplace_back("f1");
  names.emplace_back("weighted");
  for (const std::string& name : names) best[name] = best_eval_index(log, name);

  const json summary{{"seed", log.seed},
                     {"config", config_to_json(log.config)},
                     {"records", log.records.size()},
                     {"reward_sum", reward_sum},
                     {"final_val", metrics_to_json(log.records.back().metrics)},
                     {"final_test", metrics_to_json(log.final_test)},
                     {"best_step", best}};
  std::ofstream out = open_out(path);
  out << summary.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

void write_compare_csv(const std::vector<StrategySummaryRow>& rows,
                       const std::string& path) {
  std::ofstream out = open_out(path);
  out << "strategy,loss,metric,mean,std,n_seeds\n";
  for (const StrategySummaryRow& r : rows)
    out << r.strategy << ',' << r.loss << ',' << r.metric << ',' << fmt_double(r.mean)
        << ',' << fmt_double(r.stddev) << ',' << r.n_seeds << "\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

void write_bandit_csv(const std::vector<Eigen::VectorXd>& trajectory,
                      const std::string& path) {
  if (trajectory.empty()) throw std::invalid_argument("write_bandit_csv: empty trajectory");
  std::ofstream out = open_out(path);
  out << "step";
  for (Eigen::Index a = 0; a < trajectory.front().size(); ++a) out << ",p_" << a;
  out << "\n";
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    out << t;
    for (Eigen::Index a = 0; a < trajectory[t].size(); ++a)
      out << ',' << fmt_double(trajectory[t](a));
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

int escape_steps(const std::vector<Eigen::VectorXd>& trajectory, int action,
                 double threshold) {
  for (std::size_t t = 0; t < trajectory.size(); ++t)
    if (trajectory[t](action) > threshold) return static_cast<int>(t);
  return -1;
}

void write_bandit_summary(const std::vector<Eigen::VectorXd>& trajectory,
                          const std::vector<double>& rewards,
                          const std::vector<double>& init_logits, double lr,
                          const std::string& path) {
  if (trajectory.empty()) throw std::invalid_argument("write_bandit_summary: empty trajectory");
  int optimal = 0;
  for (std::size_t i = 1; i < rewards.size(); ++i)
    if (rewards[i] > rewards[static_cast<std::size_t>(optimal)]) optimal = static_cast<int>(i);
  const json summary{{"rewards", rewards},
                     {"init_logits", init_logits},
                     {"lr", lr},
                     {"steps", trajectory.size() - 1},
                     {"optimal_action", optimal},
                     {"escape_steps", escape_steps(trajectory, optimal)}};
  std::ofstream out = open_out(path);
  out << summary.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

void write_ablation_summary(const std::vector<InitAblationResult>& results,
                            const std::string& path) {
  json inits = json::array();
  for (const InitAblationResult& r : results) {
    json dips = json::array();
    for (std::size_t s = 0; s < r.dips.size(); ++s) {
      if (r.dips[s].has_value()) {
        dips.push_back(json{{"seed", r.seeds[s]},
                            {"index", r.dips[s]->first},
                            {"depth", r.dips[s]->second}});
      } else {
        dips.push_back(nullptr);
      }
    }
    inits.push_back(json{{"name", r.init_name},
                         {"n_seeds", r.seeds.size()},
                         {"dip_rate", r.dip_rate},
                         {"dips", dips}});
  }
  const json summary{{"inits", inits}};
  std::ofstream out = open_out(path);
  out << summary.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

void write_trajectories_csv(const InitAblationResult& result, const std::string& path) {
  if (result.trajectories.empty())
    throw std::invalid_argument("write_trajectories_csv: no trajectories");
  std::ofstream out = open_out(path);
  out << "step";
  for (std::uint64_t s : result.seeds) out << ",seed_" << s;
  out << "\n";
  const std::size_t steps = result.trajectories.front().size();
  for (const auto& traj : result.trajectories)
    if (traj.size() != steps)
      throw std::invalid_argument("write_trajectories_csv: ragged trajectories");
  for (std::size_t t = 0; t < steps; ++t) {
    out << t;
    for (const auto& traj : result.trajectories) out << ',' << fmt_double(traj[t]);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

void write_metrics_json(const MetricReport& report, const std::string& path) {
  std::ofstream out = open_out(path);
  out << metrics_to_json(report).dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

void validate_run_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  int index = 0;
  Eigen::Index state_dim = -1;
  while (std::getline(in, line)) {
    json r;
    try {
      r = json::parse(line);
    } catch (const json::exception& e) {
      fail(path, "line " + std::to_string(index + 1) + ": " + e.what());
    }
    if (!r.contains("step") || !r["step"].is_number_integer() ||
        r["step"].get<int>() != index)
      fail(path, "line " + std::to_string(index + 1) + ": bad step");
    if (!r.contains("reward") || !r["reward"].is_number())
      fail(path, "line " + std::to_string(index + 1) + ": bad reward");
    if (index == 0 && r["reward"].get<double>() != 0.0)
      fail(path, "first record must have zero reward");
    if (!r.contains("state") || !r["state"].is_array() || r["state"].empty())
      fail(path, "line " + std::to_string(index + 1) + ": bad state");
    if (state_dim < 0) state_dim = static_cast<Eigen::Index>(r["state"].size());
    if (static_cast<Eigen::Index>(r["state"].size()) != state_dim)
      fail(path, "state dimension changes across records");
    if (!r.contains("metrics")) fail(path, "record missing metrics");
    check_metrics_json(r["metrics"], path);
    if (!r.contains("dist") || !r["dist"].contains("weights") ||
        !r["dist"].contains("bin_edges"))
      fail(path, "record missing distribution snapshot");
    check_simplex(r["dist"]["weights"], path);
    const auto& edges = r["dist"]["bin_edges"];
    if (!edges.is_array() || edges.size() != r["dist"]["weights"].size() + 1)
      fail(path, "bin_edges size mismatch");
    if (edges.front().get<double>() != 0.0 || edges.back().get<double>() != 2.0)
      fail(path, "bin_edges must span [0,2]");
    const int B = static_cast<int>(r["dist"]["weights"].size());
    if (!r.contains("action") || !r["action"].is_number_integer() ||
        r["action"].get<int>() < 0 || r["action"].get<int>() > 2 * B)
      fail(path, "action code out of range");
    ++index;
  }
  if (index == 0) fail(path, "no records");
}

void validate_run_summary(const std::string& path) {
  const json j = parse_file(path);
  for (const char* field :
       {"seed", "config", "records", "reward_sum", "final_val", "final_test", "best_step"})
    if (!j.contains(field)) fail(path, std::string("summary missing field ") + field);
  if (!j["records"].is_number_integer() || j["records"].get<int>() < 1)
    fail(path, "records must be a positive integer");
  if (!j["reward_sum"].is_number()) fail(path, "reward_sum not a number");
  check_metrics_json(j["final_val"], path);
  check_metrics_json(j["final_test"], path);
  const json& cfg = j["config"];
  if (!cfg.is_object() || !cfg.contains("loss") || !cfg.contains("sampler"))
    fail(path, "config echo missing loss/sampler");
  loss_kind_from_string(cfg["loss"].get<std::string>());
  sampler_kind_from_string(cfg["sampler"].get<std::string>());
  if (!j["best_step"].is_object() || j["best_step"].empty())
    fail(path, "best_step missing");
  for (const auto& [name, v] : j["best_step"].items()) {
    if (!v.is_number_integer() || v.get<int>() < 0 ||
        v.get<int>() >= j["records"].get<int>())
      fail(path, "best_step." + name + " out of range");
  }
}

void validate_compare_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "strategy,loss,metric,mean,std,n_seeds")
    fail(path, "bad header");
  int rows = 0;
  while (std::getline(in, line)) {
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 6) fail(path, "row with wrong field count");
    sampler_kind_from_string(f[0]);
    loss_kind_from_string(f[1]);
    if (f[2].empty()) fail(path, "empty metric name");
    parse_csv_number(f[3], path);
    const double stddev = parse_csv_number(f[4], path);
    if (stddev < 0.0) fail(path, "negative std");
    if (std::stoi(f[5]) < 1) fail(path, "n_seeds must be positive");
    ++rows;
  }
  if (rows == 0) fail(path, "no data rows");
}

void validate_bandit_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) fail(path, "empty file");
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "step") fail(path, "bad header");
  for (std::size_t a = 1; a < header.size(); ++a)
    if (header[a] != "p_" + std::to_string(a - 1)) fail(path, "bad header column");
  int index = 0;
  while (std::getline(in, line)) {
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != header.size()) fail(path, "row with wrong field count");
    if (std::stoi(f[0]) != index) fail(path, "non-contiguous step column");
    double total = 0.0;
    for (std::size_t a = 1; a < f.size(); ++a) {
      const double p = parse_csv_number(f[a], path);
      if (p < 0.0 || p > 1.0) fail(path, "probability outside [0,1]");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) fail(path, "row probabilities do not sum to 1");
    ++index;
  }
  if (index < 2) fail(path, "need at least the initial point and one step");
}

void validate_bandit_summary(const std::string& path) {
  const json j = parse_file(path);
  for (const char* field :
       {"rewards", "init_logits", "lr", "steps", "optimal_action", "escape_steps"})
    if (!j.contains(field)) fail(path, std::string("bandit summary missing ") + field);
  if (!j["rewards"].is_array() || j["rewards"].size() < 2)
    fail(path, "rewards must list at least 2 actions");
  if (j["init_logits"].size() != j["rewards"].size())
    fail(path, "init_logits length mismatch");
  if (j["lr"].get<double>() <= 0.0) fail(path, "lr must be positive");
  if (j["steps"].get<int>() < 1) fail(path, "steps must be >= 1");
  const int a = j["optimal_action"].get<int>();
  if (a < 0 || a >= static_cast<int>(j["rewards"].size()))
    fail(path, "optimal_action out of range");
  if (j["escape_steps"].get<int>() < -1) fail(path, "bad escape_steps");
}

void validate_ablation_summary(const std::string& path) {
  const json j = parse_file(path);
  if (!j.contains("inits") || !j["inits"].is_array() || j["inits"].empty())
    fail(path, "missing inits array");
  for (const auto& entry : j["inits"]) {
    for (const char* field : {"name", "n_seeds", "dip_rate", "dips"})
      if (!entry.contains(field)) fail(path, std::string("init entry missing ") + field);
    init_kind_from_string(entry["name"].get<std::string>());
    const double rate = entry["dip_rate"].get<double>();
    if (rate < 0.0 || rate > 1.0) fail(path, "dip_rate outside [0,1]");
    const int n = entry["n_seeds"].get<int>();
    if (n < 1 || static_cast<int>(entry["dips"].size()) != n)
      fail(path, "dips length must equal n_seeds");
    for (const auto& dip : entry["dips"]) {
      if (dip.is_null()) continue;
      if (!dip.contains("index") || !dip.contains("depth") || !dip.contains("seed"))
        fail(path, "dip entry missing fields");
      if (dip["index"].get<int>() < 1) fail(path, "dip index must be >= 1");
      if (dip["depth"].get<double>() <= 0.0) fail(path, "dip depth must be positive");
    }
  }
}

void validate_trajectories_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) fail(path, "empty file");
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "step") fail(path, "bad header");
  for (std::size_t c = 1; c < header.size(); ++c)
    if (header[c].rfind("seed_", 0) != 0) fail(path, "bad seed column name");
  int index = 0;
  while (std::getline(in, line)) {
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != header.size()) fail(path, "row with wrong field count");
    if (std::stoi(f[0]) != index) fail(path, "non-contiguous step column");
    for (std::size_t c = 1; c < f.size(); ++c) parse_csv_number(f[c], path);
    ++index;
  }
  if (index < 1) fail(path, "no data rows");
}

void validate_metrics_json(const std::string& path) {
  check_metrics_json(parse_file(path), path);
}

}  // namespace asrlab
