#include "asrlab/encoder.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace asrlab {
namespace {

constexpr double kNormEps = 1e-12;

void fill_glorot(Eigen::MatrixXd& W, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(W.rows() + W.cols()));
  std::uniform_real_distribution<double> unif(-bound, bound);
  for (Eigen::Index i = 0; i < W.rows(); ++i)
    for (Eigen::Index j = 0; j < W.cols(); ++j) W(i, j) = unif(rng);
}

bool all_finite(const Eigen::MatrixXd& M) { return M.allFinite(); }

void adam_update(Eigen::MatrixXd& p, Eigen::MatrixXd& m, Eigen::MatrixXd& v,
                 const Eigen::MatrixXd& g, double lr, double beta1, double beta2,
                 double eps, double bc1, double bc2) {
  m = beta1 * m + (1.0 - beta1) * g;
  v = beta2 * v + (1.0 - beta2) * g.cwiseProduct(g);
  p.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
}

void adam_update(Eigen::VectorXd& p, Eigen::VectorXd& m, Eigen::VectorXd& v,
                 const Eigen::VectorXd& g, double lr, double beta1, double beta2,
                 double eps, double bc1, double bc2) {
  m = beta1 * m + (1.0 - beta1) * g;
  v = beta2 * v + (1.0 - beta2) * g.cwiseProduct(g);
  p.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
}

}  // namespace

EncoderParams init_encoder(int input_dim, int hidden_dim, int output_dim,
                           std::uint64_t seed) {
  if (input_dim < 1 || hidden_dim < 1 || output_dim < 1)
    throw std::invalid_argument("init_encoder: dimensions must be positive");
  std::mt19937_64 rng(seed);
  EncoderParams p;
  p.W1.resize(hidden_dim, input_dim);
  p.W2.resize(output_dim, hidden_dim);
  fill_glorot(p.W1, rng);
  fill_glorot(p.W2, rng);
  p.b1 = Eigen::VectorXd::Zero(hidden_dim);
  p.b2 = Eigen::VectorXd::Zero(output_dim);
  p.mW1 = Eigen::MatrixXd::Zero(hidden_dim, input_dim);
  p.vW1 = p.mW1;
  p.mW2 = Eigen::MatrixXd::Zero(output_dim, hidden_dim);
  p.vW2 = p.mW2;
  p.mb1 = Eigen::VectorXd::Zero(hidden_dim);
  p.vb1 = p.mb1;
  p.mb2 = Eigen::VectorXd::Zero(output_dim);
  p.vb2 = p.mb2;
  p.t = 0;
  return p;
}

EmbeddingBatch embed_forward(const EncoderParams& params, const Eigen::MatrixXd& X) {
  if (X.cols() != params.W1.cols())
    throw std::invalid_argument("embed_forward: input dim mismatch");
  EmbeddingBatch out;
  out.input = X;
  out.hidden = ((X * params.W1.transpose()).rowwise() + params.b1.transpose())
                   .cwiseMax(0.0);
  out.prenorm =
      (out.hidden * params.W2.transpose()).rowwise() + params.b2.transpose();
  out.embeddings.resizeLike(out.prenorm);
  for (Eigen::Index i = 0; i < out.prenorm.rows(); ++i) {
    const double norm = out.prenorm.row(i).norm();
    out.embeddings.row(i) = out.prenorm.row(i) / (norm + kNormEps);
  }
  return out;
}

EncoderGrads embed_backward(const EmbeddingBatch& batch,
                            const Eigen::MatrixXd& grad_embeddings,
                            const EncoderParams& params) {
  const Eigen::Index b = batch.embeddings.rows();
  if (grad_embeddings.rows() != b || grad_embeddings.cols() != batch.embeddings.cols())
    throw std::invalid_argument("embed_backward: gradient shape mismatch");
  if (batch.input.cols() != params.W1.cols() ||
      batch.hidden.cols() != params.W2.cols() ||
      batch.prenorm.cols() != params.W2.rows())
    throw std::invalid_argument("embed_backward: cache does not match params");

  // Through row normalization z -> z/(|z|+eps):
  // grad_z = g/s - z (z.g)/(s^2 |z|), s = |z| + eps.
  Eigen::MatrixXd grad_z(b, batch.prenorm.cols());
  for (Eigen::Index i = 0; i < b; ++i) {
    const double norm = batch.prenorm.row(i).norm();
    const double s = norm + kNormEps;
    const double zg = batch.prenorm.row(i).dot(grad_embeddings.row(i));
    const double coeff = norm > 0.0 ? zg / (s * s * norm) : 0.0;
    grad_z.row(i) = grad_embeddings.row(i) / s - batch.prenorm.row(i) * coeff;
  }

  EncoderGrads g;
  g.W2 = grad_z.transpose() * batch.hidden;
  g.b2 = grad_z.colwise().sum().transpose();
  Eigen::MatrixXd grad_hidden = grad_z * params.W2;
  grad_hidden = grad_hidden.cwiseProduct(
      (batch.hidden.array() > 0.0).cast<double>().matrix());
  g.W1 = grad_hidden.transpose() * batch.input;
  g.b1 = grad_hidden.colwise().sum().transpose();
  return g;
}

void optimizer_step(EncoderParams& params, const EncoderGrads& grads, double lr,
                    double beta1, double beta2, double eps) {
  if (lr <= 0.0) throw std::invalid_argument("optimizer_step: lr must be positive");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
    throw std::invalid_argument("optimizer_step: betas must lie in [0,1)");
  if (!all_finite(grads.W1) || !grads.b1.allFinite() || !all_finite(grads.W2) ||
      !grads.b2.allFinite())
    throw std::invalid_argument("optimizer_step: non-finite gradient");
  if (grads.W1.rows() != params.W1.rows() || grads.W1.cols() != params.W1.cols() ||
      grads.W2.rows() != params.W2.rows() || grads.W2.cols() != params.W2.cols() ||
      grads.b1.size() != params.b1.size() || grads.b2.size() != params.b2.size())
    throw std::invalid_argument("optimizer_step: gradient shape mismatch");

  params.t += 1;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(params.t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(params.t));
  adam_update(params.W1, params.mW1, params.vW1, grads.W1, lr, beta1, beta2, eps, bc1, bc2);
  adam_update(params.b1, params.mb1, params.vb1, grads.b1, lr, beta1, beta2, eps, bc1, bc2);
  adam_update(params.W2, params.mW2, params.vW2, grads.W2, lr, beta1, beta2, eps, bc1, bc2);
  adam_update(params.b2, params.mb2, params.vb2, grads.b2, lr, beta1, beta2, eps, bc1, bc2);
}

}  // namespace asrlab
