#include "asrlab/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace asrlab {
namespace {

using TensorMap = std::map<std::string, Eigen::MatrixXd>;

// %a/strtod keeps every double bit-exact through the text round trip
std::string hex_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double parse_double(const std::string& s, const std::string& path) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw std::runtime_error("checkpoint: bad number '" + s + "' in " + path);
  return v;
}

void write_tensors(const std::string& path, const std::string& kind,
                   const TensorMap& tensors) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path);
  out << "asrlab-checkpoint 1 " << kind << "\n" << tensors.size() << "\n";
  for (const auto& [name, M] : tensors) {
    out << name << ' ' << M.rows() << ' ' << M.cols() << "\n";
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      for (Eigen::Index j = 0; j < M.cols(); ++j) {
        if (j) out << ' ';
        out << hex_double(M(i, j));
      }
      out << "\n";
    }
  }
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

TensorMap read_tensors(const std::string& path, const std::string& kind) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  std::string header;
  std::getline(in, header);
  if (header != "asrlab-checkpoint 1 " + kind)
    throw std::runtime_error("checkpoint: " + path + " is not a " + kind +
                             " checkpoint");
  std::size_t count = 0;
  in >> count;
  TensorMap tensors;
  for (std::size_t e = 0; e < count; ++e) {
    std::string name;
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> name >> rows >> cols) || rows < 0 || cols < 0)
      throw std::runtime_error("checkpoint: truncated header in " + path);
    Eigen::MatrixXd M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        std::string token;
        if (!(in >> token))
          throw std::runtime_error("checkpoint: truncated tensor " + name + " in " + path);
        M(i, j) = parse_double(token, path);
      }
    }
    tensors.emplace(name, std::move(M));
  }
  return tensors;
}

const Eigen::MatrixXd& need(const TensorMap& tensors, const std::string& name,
                            const std::string& path) {
  const auto it = tensors.find(name);
  if (it == tensors.end())
    throw std::runtime_error("checkpoint: missing tensor " + name + " in " + path);
  return it->second;
}

Eigen::MatrixXd from_vector(const Eigen::VectorXd& v) { return v; }

Eigen::VectorXd to_vector(const Eigen::MatrixXd& M, const std::string& name,
                          const std::string& path) {
  if (M.cols() != 1)
    throw std::runtime_error("checkpoint: tensor " + name + " in " + path +
                             " is not a column vector");
  return M.col(0);
}

}  // namespace

void save_encoder_checkpoint(const EncoderParams& p, const std::string& path) {
  TensorMap t;
  t["W1"] = p.W1;
  t["b1"] = from_vector(p.b1);
  t["W2"] = p.W2;
  t["b2"] = from_vector(p.b2);
  t["mW1"] = p.mW1;
  t["vW1"] = p.vW1;
  t["mb1"] = from_vector(p.mb1);
  t["vb1"] = from_vector(p.vb1);
  t["mW2"] = p.mW2;
  t["vW2"] = p.vW2;
  t["mb2"] = from_vector(p.mb2);
  t["vb2"] = from_vector(p.vb2);
  Eigen::MatrixXd step(1, 1);
  step(0, 0) = static_cast<double>(p.t);
  t["t"] = step;
  write_tensors(path, "encoder", t);
}

EncoderParams load_encoder_checkpoint(const std::string& path) {
  const TensorMap t = read_tensors(path, "encoder");
  EncoderParams p;
  p.W1 = need(t, "W1", path);
  p.b1 = to_vector(need(t, "b1", path), "b1", path);
  p.W2 = need(t, "W2", path);
  p.b2 = to_vector(need(t, "b2", path), "b2", path);
  p.mW1 = need(t, "mW1", path);
  p.vW1 = need(t, "vW1", path);
  p.mb1 = to_vector(need(t, "mb1", path), "mb1", path);
  p.vb1 = to_vector(need(t, "vb1", path), "vb1", path);
  p.mW2 = need(t, "mW2", path);
  p.vW2 = need(t, "vW2", path);
  p.mb2 = to_vector(need(t, "mb2", path), "mb2", path);
  p.vb2 = to_vector(need(t, "vb2", path), "vb2", path);
  p.t = static_cast<long>(need(t, "t", path)(0, 0));
  return p;
}

void save_policy_checkpoint(const PolicyParams& p, const std::string& path) {
  TensorMap t;
  t["V1"] = p.V1;
  t["c1"] = from_vector(p.c1);
  t["V2"] = p.V2;
  t["c2"] = from_vector(p.c2);
  write_tensors(path, "policy", t);
}

PolicyParams load_policy_checkpoint(const std::string& path) {
  const TensorMap t = read_tensors(path, "policy");
  PolicyParams p;
  p.V1 = need(t, "V1", path);
  p.c1 = to_vector(need(t, "c1", path), "c1", path);
  p.V2 = need(t, "V2", path);
  p.c2 = to_vector(need(t, "c2", path), "c2", path);
  return p;
}

}  // namespace asrlab
