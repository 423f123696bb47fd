#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace asrlab {

// Rows are examples; labels[i] is the class of row i. Labels are contiguous
// ids 0..C-1 so they can index per-class bookkeeping directly.
struct LabeledDataset {
  Eigen::MatrixXd features;
  std::vector<int> labels;

  int size() const { return static_cast<int>(features.rows()); }
  int dim() const { return static_cast<int>(features.cols()); }
  int num_classes() const;

  // Throws std::invalid_argument if rows/labels disagree or labels are not
  // contiguous from zero.
  void validate() const;
};

struct BlobSpec {
  int num_classes = 4;
  int points_per_class = 50;
  int dim = 20;
  double spread = 0.05;
  std::uint64_t seed = 1;
};

// Isotropic Gaussian blobs: class means drawn uniformly from [0,4]^dim, then
// each point is mean + spread * standard normal noise.
LabeledDataset gen_gaussian_blobs(const BlobSpec& spec);

// CSV rows are "x_0,...,x_{d-1},label". Parse failures throw
// std::runtime_error naming the 1-based line number. Labels are remapped to
// contiguous ids by ascending original value.
LabeledDataset load_csv(const std::string& path, bool has_header = false);
void save_csv(const LabeledDataset& data, const std::string& path);

// Disjoint-class split: classes 0..C/2-1 train, the rest test (odd C puts
// the extra class in test). Each side gets labels remapped to start at zero;
// original_classes[k] is the source class of remapped label k.
struct ClassSplit {
  LabeledDataset train;
  LabeledDataset test;
  std::vector<int> train_original_classes;
  std::vector<int> test_original_classes;
};
ClassSplit split_by_class_half(const LabeledDataset& data);

struct SplitSpec {
  double val_fraction = 0.15;
  std::uint64_t seed = 1;
};

// Row-level split: round(val_fraction * N) rows drawn uniformly without
// replacement form the validation set. Index vectors refer to rows of the
// input dataset.
struct TrainValSplit {
  LabeledDataset train;
  LabeledDataset val;
  std::vector<int> train_indices;
  std::vector<int> val_indices;
};
TrainValSplit split_train_val(const LabeledDataset& data, const SplitSpec& spec);

}  // namespace asrlab
