#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace asrlab::cli {

struct CommonOptions {
  std::string config_path;  // empty uses built-in defaults
  std::vector<std::pair<std::string, std::string>> overrides;
  std::optional<std::uint64_t> seed;  // replaces the config seed list
  std::string out_dir;                // overrides the config out_dir
};

struct BanditOptions {
  std::string rewards = "1.0,0.9,0.1";
  std::string init_logits;  // empty means all-zero
  int steps = 200;
  double lr = 0.1;
  std::string out_dir = "out";
};

// Exit codes: 0 success, 1 runtime failure, 2 invalid config.
int cmd_train(const CommonOptions& opts);
int cmd_ablate_init(const CommonOptions& opts, double dip_delta);
int cmd_compare(const CommonOptions& opts);
int cmd_bandit(const BanditOptions& opts);
int cmd_eval(const CommonOptions& opts, const std::string& checkpoint_path);

}  // namespace asrlab::cli
