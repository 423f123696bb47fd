#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

// --set key=value, repeatable
std::vector<std::pair<std::string, std::string>> split_overrides(
    const std::vector<std::string>& raw) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const std::string& item : raw) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--set", "expected key=value, got '" + item + "'");
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return out;
}

void add_common_flags(CLI::App* cmd, std::string& config, std::vector<std::string>& sets,
                      std::uint64_t& seed, bool& seed_set, std::string& out) {
  cmd->add_option("--config", config, "experiment config file");
  cmd->add_option("--set", sets, "override a config key (key=value, repeatable)");
  cmd->add_option("--seed", seed, "run a single seed instead of the config list")
      ->each([&seed_set](const std::string&) { seed_set = true; });
  cmd->add_option("--out", out, "output directory");
}

asrlab::cli::CommonOptions make_common(const std::string& config,
                                       const std::vector<std::string>& sets,
                                       std::uint64_t seed, bool seed_set,
                                       const std::string& out) {
  asrlab::cli::CommonOptions opts;
  opts.config_path = config;
  opts.overrides = split_overrides(sets);
  if (seed_set) opts.seed = seed;
  opts.out_dir = out;
  return opts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"laboratory for reward-guided adaptive negative sampling"};
  app.require_subcommand(1);

  std::string config, out;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  bool seed_set = false;

  CLI::App* train = app.add_subcommand("train", "run one episode per seed");
  add_common_flags(train, config, sets, seed, seed_set, out);

  CLI::App* ablate = app.add_subcommand(
      "ablate-init", "sweep the six initial distributions with shared seeds");
  double dip_delta = 0.02;
  add_common_flags(ablate, config, sets, seed, seed_set, out);
  ablate->add_option("--dip-delta", dip_delta, "dip detection threshold");

  CLI::App* compare = app.add_subcommand(
      "compare", "compare sampling strategies across losses and seeds");
  add_common_flags(compare, config, sets, seed, seed_set, out);

  CLI::App* bandit =
      app.add_subcommand("bandit", "one-state softmax bandit trajectory");
  asrlab::cli::BanditOptions bandit_opts;
  bandit->add_option("--rewards", bandit_opts.rewards, "comma-separated action rewards");
  bandit->add_option("--init-logits", bandit_opts.init_logits,
                     "comma-separated initial logits (default zeros)");
  bandit->add_option("--steps", bandit_opts.steps, "gradient steps");
  bandit->add_option("--lr", bandit_opts.lr, "learning rate");
  bandit->add_option("--out", bandit_opts.out_dir, "output directory");

  CLI::App* eval = app.add_subcommand("eval", "evaluate an encoder checkpoint");
  std::string checkpoint;
  add_common_flags(eval, config, sets, seed, seed_set, out);
  eval->add_option("--checkpoint", checkpoint, "encoder checkpoint path")->required();

  try {
    app.parse(argc, argv);

    if (train->parsed())
      return asrlab::cli::cmd_train(make_common(config, sets, seed, seed_set, out));
    if (ablate->parsed())
      return asrlab::cli::cmd_ablate_init(
          make_common(config, sets, seed, seed_set, out), dip_delta);
    if (compare->parsed())
      return asrlab::cli::cmd_compare(make_common(config, sets, seed, seed_set, out));
    if (bandit->parsed()) return asrlab::cli::cmd_bandit(bandit_opts);
    if (eval->parsed())
      return asrlab::cli::cmd_eval(make_common(config, sets, seed, seed_set, out),
                                   checkpoint);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return 2;
}
