#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "asrlab/asr_loop.hpp"
#include "asrlab/dataset.hpp"

namespace asrlab {

// Invalid or unknown configuration; the CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Everything a command needs: the run configuration, the data source, and
// the sweep seeds. data_csv, when set, replaces the synthetic blobs.
struct ExperimentConfig {
  AsrConfig run;
  BlobSpec data{8, 50, 20, 1.6, 1};
  std::string data_csv;
  bool data_csv_header = false;
  double val_fraction = 0.15;
  std::string out_dir = "out";
  std::vector<std::uint64_t> seeds = {0};
};

ExperimentConfig default_experiment_config();

// "key = value" lines, '#' comments, dotted keys; unknown keys raise
// ConfigError naming the key.
ExperimentConfig load_experiment_config(const std::string& path);

// Single dotted-key assignment (config file line or --set override).
void apply_override(ExperimentConfig& cfg, const std::string& key,
                    const std::string& value);

// Classes split in half for train vs test, then a row-level validation split
// of the training half.
DataBundle build_data(const ExperimentConfig& cfg);

}  // namespace asrlab
