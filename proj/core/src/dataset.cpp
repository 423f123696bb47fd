#include "asrlab/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "asrlab/random.hpp"

namespace asrlab {
namespace {

// Remaps labels to contiguous ids ordered by ascending original value.
void remap_labels(std::vector<int>& labels) {
  std::map<int, int> to_new;
  for (int v : labels) to_new.emplace(v, 0);
  int next = 0;
  for (auto& [orig, id] : to_new) id = next++;
  for (int& v : labels) v = to_new.at(v);
}

LabeledDataset take_rows(const LabeledDataset& data, const std::vector<int>& rows) {
  LabeledDataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), data.features.cols());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = data.features.row(rows[i]);
    out.labels.push_back(data.labels[static_cast<std::size_t>(rows[i])]);
  }
  remap_labels(out.labels);
  return out;
}

}  // namespace

int LabeledDataset::num_classes() const {
  int max_label = -1;
  for (int v : labels) max_label = std::max(max_label, v);
  return max_label + 1;
}

void LabeledDataset::validate() const {
  if (features.rows() != static_cast<Eigen::Index>(labels.size()))
    throw std::invalid_argument("dataset: feature rows and label count differ");
  if (labels.empty()) throw std::invalid_argument("dataset: empty");
  if (!features.allFinite())
    throw std::invalid_argument("dataset: non-finite feature value");
  const int C = num_classes();
  std::vector<char> seen(static_cast<std::size_t>(C), 0);
  for (int v : labels) {
    if (v < 0) throw std::invalid_argument("dataset: negative label");
    seen[static_cast<std::size_t>(v)] = 1;
  }
  for (int c = 0; c < C; ++c)
    if (!seen[static_cast<std::size_t>(c)])
      throw std::invalid_argument("dataset: labels not contiguous from 0");
}

LabeledDataset gen_gaussian_blobs(const BlobSpec& spec) {
  if (spec.num_classes < 1 || spec.points_per_class < 1 || spec.dim < 1 ||
      spec.spread <= 0.0)
    throw std::invalid_argument("gen_gaussian_blobs: arguments must be positive");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Eigen::MatrixXd means(spec.num_classes, spec.dim);
  for (int c = 0; c < spec.num_classes; ++c)
    for (int j = 0; j < spec.dim; ++j) means(c, j) = 4.0 * unif(rng);

  LabeledDataset data;
  data.features.resize(
      static_cast<Eigen::Index>(spec.num_classes) * spec.points_per_class, spec.dim);
  data.labels.reserve(static_cast<std::size_t>(data.features.rows()));
  Eigen::Index row = 0;
  for (int c = 0; c < spec.num_classes; ++c) {
    for (int i = 0; i < spec.points_per_class; ++i, ++row) {
      for (int j = 0; j < spec.dim; ++j)
        data.features(row, j) = means(c, j) + spec.spread * gauss(rng);
      data.labels.push_back(c);
    }
  }
  return data;
}

LabeledDataset load_csv(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  int line_no = 0;
  int width = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (has_header && line_no == 1) continue;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.push_back("");
    if (width < 0) {
      if (fields.size() < 2)
        throw std::runtime_error("load_csv: " + path + " line " +
                                 std::to_string(line_no) +
                                 ": need at least one feature and a label");
      width = static_cast<int>(fields.size());
    }
    if (static_cast<int>(fields.size()) != width)
      throw std::runtime_error("load_csv: " + path + " line " + std::to_string(line_no) +
                               ": expected " + std::to_string(width) + " fields, got " +
                               std::to_string(fields.size()));
    std::vector<double> feats(static_cast<std::size_t>(width - 1));
    for (int j = 0; j < width - 1; ++j) {
      const std::string& f = fields[static_cast<std::size_t>(j)];
      std::size_t pos = 0;
      try {
        feats[static_cast<std::size_t>(j)] = std::stod(f, &pos);
      } catch (const std::exception&) {
        pos = std::string::npos;
      }
      if (pos != f.size())
        throw std::runtime_error("load_csv: " + path + " line " +
                                 std::to_string(line_no) + ": bad number '" + f + "'");
    }
    const std::string& lab = fields.back();
    std::size_t pos = 0;
    long value = 0;
    try {
      value = std::stol(lab, &pos);
    } catch (const std::exception&) {
      pos = std::string::npos;
    }
    if (pos != lab.size())
      throw std::runtime_error("load_csv: " + path + " line " + std::to_string(line_no) +
                               ": bad label '" + lab + "'");
    rows.push_back(std::move(feats));
    labels.push_back(static_cast<int>(value));
  }
  if (rows.empty()) throw std::runtime_error("load_csv: " + path + ": no data rows");

  LabeledDataset data;
  data.features.resize(static_cast<Eigen::Index>(rows.size()), width - 1);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < width - 1; ++j)
      data.features(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
  data.labels = std::move(labels);
  remap_labels(data.labels);
  return data;
}

void save_csv(const LabeledDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_csv: cannot open " + path);
  out.precision(17);
  for (int i = 0; i < data.size(); ++i) {
    for (int j = 0; j < data.dim(); ++j) out << data.features(i, j) << ',';
    out << data.labels[static_cast<std::size_t>(i)] << '\n';
  }
  if (!out) throw std::runtime_error("save_csv: write failed for " + path);
}

ClassSplit split_by_class_half(const LabeledDataset& data) {
  data.validate();
  const int C = data.num_classes();
  if (C < 2) throw std::invalid_argument("split_by_class_half: need at least 2 classes");
  const int h = C / 2;
  std::vector<int> train_rows, test_rows;
  for (int i = 0; i < data.size(); ++i) {
    if (data.labels[static_cast<std::size_t>(i)] < h)
      train_rows.push_back(i);
    else
      test_rows.push_back(i);
  }
  ClassSplit split;
  split.train = take_rows(data, train_rows);
  split.test = take_rows(data, test_rows);
  for (int c = 0; c < h; ++c) split.train_original_classes.push_back(c);
  for (int c = h; c < C; ++c) split.test_original_classes.push_back(c);
  return split;
}

TrainValSplit split_train_val(const LabeledDataset& data, const SplitSpec& spec) {
  data.validate();
  if (spec.val_fraction < 0.0 || spec.val_fraction >= 1.0)
    throw std::invalid_argument("split_train_val: val_fraction must be in [0,1)");
  const int N = data.size();
  const int n_val = static_cast<int>(
      std::lround(spec.val_fraction * static_cast<double>(N)));

  std::vector<int> order(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) order[static_cast<std::size_t>(i)] = i;
  std::mt19937_64 rng(derive_seed(spec.seed, "train_val_split"));
  std::shuffle(order.begin(), order.end(), rng);

  TrainValSplit split;
  split.val_indices.assign(order.begin(), order.begin() + n_val);
  split.train_indices.assign(order.begin() + n_val, order.end());
  std::sort(split.train_indices.begin(), split.train_indices.end());
  std::sort(split.val_indices.begin(), split.val_indices.end());
  split.train = take_rows(data, split.train_indices);
  if (!split.val_indices.empty()) split.val = take_rows(data, split.val_indices);
  return split;
}

}  // namespace asrlab
