#include <cmath>
#include <random>

#include "asrlab/encoder.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace asrlab;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols,
                              std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = gauss(rng);
  return M;
}

}  // namespace

TEST_CASE("encoder init produces the requested shapes with zeroed state") {
  const EncoderParams p = init_encoder(5, 8, 3, 42);
  CHECK(p.input_dim() == 5);
  CHECK(p.hidden_dim() == 8);
  CHECK(p.output_dim() == 3);
  CHECK(p.t == 0);
  CHECK(p.b1.isZero());
  CHECK(p.b2.isZero());
  CHECK(p.mW1.isZero());
  CHECK(p.vW2.isZero());
  const double bound1 = std::sqrt(6.0 / (8 + 5));
  CHECK(p.W1.cwiseAbs().maxCoeff() <= bound1);
  CHECK(p.W1.cwiseAbs().maxCoeff() > 0.0);

  const EncoderParams q = init_encoder(5, 8, 3, 42);
  CHECK(p.W1 == q.W1);
  CHECK(p.W2 == q.W2);
  const EncoderParams r = init_encoder(5, 8, 3, 43);
  CHECK(p.W1 != r.W1);

  CHECK_THROWS_AS(init_encoder(0, 8, 3, 1), std::invalid_argument);
}

TEST_CASE("forward pass normalizes rows and caches intermediates") {
  std::mt19937_64 rng(1);
  const EncoderParams p = init_encoder(4, 6, 3, 7);
  const Eigen::MatrixXd X = random_matrix(5, 4, rng);
  const EmbeddingBatch batch = embed_forward(p, X);
  CHECK(batch.embeddings.rows() == 5);
  CHECK(batch.embeddings.cols() == 3);
  CHECK(batch.input == X);
  CHECK(batch.hidden.minCoeff() >= 0.0);
  for (Eigen::Index i = 0; i < 5; ++i)
    CHECK(batch.embeddings.row(i).norm() == doctest::Approx(1.0).epsilon(1e-9));

  const Eigen::MatrixXd bad = random_matrix(5, 3, rng);
  CHECK_THROWS_AS(embed_forward(p, bad), std::invalid_argument);
}

TEST_CASE("backward pass matches central finite differences") {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    EncoderParams p = init_encoder(3, 5, 4, 100 + static_cast<std::uint64_t>(trial));
    // a fully dead relu row pins prenorm at b2 = 0, where the normalization
    // epsilon dominates and no stencil can resolve the slope
    Eigen::MatrixXd X = random_matrix(6, 3, rng);
    while (embed_forward(p, X).prenorm.rowwise().norm().minCoeff() < 1e-2)
      X = random_matrix(6, 3, rng);
    const Eigen::MatrixXd C = random_matrix(6, 4, rng);

    const EmbeddingBatch batch = embed_forward(p, X);
    const EncoderGrads grads = embed_backward(batch, C, p);

    const auto objective = [&](const EncoderParams& params) {
      return (embed_forward(params, X).embeddings.array() * C.array()).sum();
    };
    const double h = 1e-5;

    const auto fd_matrix = [&](Eigen::MatrixXd EncoderParams::* field) {
      EncoderParams probe = p;
      return oracle::central_diff(
          [&](const Eigen::MatrixXd& W) {
            probe.*field = W;
            return objective(probe);
          },
          p.*field, h);
    };
    const auto fd_vector = [&](Eigen::VectorXd EncoderParams::* field) {
      EncoderParams probe = p;
      return oracle::central_diff(
          [&](const Eigen::MatrixXd& v) {
            probe.*field = v.col(0);
            return objective(probe);
          },
          p.*field, h);
    };

    worst = std::max(worst, oracle::rel_err(grads.W1, fd_matrix(&EncoderParams::W1)));
    worst = std::max(worst, oracle::rel_err(grads.W2, fd_matrix(&EncoderParams::W2)));
    worst = std::max(worst, oracle::rel_err(Eigen::MatrixXd(grads.b1),
                                            fd_vector(&EncoderParams::b1)));
    worst = std::max(worst, oracle::rel_err(Eigen::MatrixXd(grads.b2),
                                            fd_vector(&EncoderParams::b2)));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("backward pass validates shapes") {
  std::mt19937_64 rng(3);
  const EncoderParams p = init_encoder(4, 6, 3, 7);
  const EmbeddingBatch batch = embed_forward(p, random_matrix(5, 4, rng));
  CHECK_THROWS_AS(embed_backward(batch, random_matrix(4, 3, rng), p),
                  std::invalid_argument);
  CHECK_THROWS_AS(embed_backward(batch, random_matrix(5, 2, rng), p),
                  std::invalid_argument);
  const EncoderParams other = init_encoder(4, 7, 3, 7);
  CHECK_THROWS_AS(embed_backward(batch, random_matrix(5, 3, rng), other),
                  std::invalid_argument);
}

TEST_CASE("one optimizer step reproduces the update rule") {
  EncoderParams p = init_encoder(1, 1, 1, 9);
  const EncoderParams before = p;
  EncoderGrads g;
  g.W1 = Eigen::MatrixXd::Constant(1, 1, 2.0);
  g.b1 = Eigen::VectorXd::Constant(1, -0.5);
  g.W2 = Eigen::MatrixXd::Constant(1, 1, 0.25);
  g.b2 = Eigen::VectorXd::Constant(1, 1.0);

  const double lr = 1e-2, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  optimizer_step(p, g, lr, beta1, beta2, eps);
  CHECK(p.t == 1);

  const auto expected = [&](double param, double grad) {
    const double m = (1.0 - beta1) * grad;
    const double v = (1.0 - beta2) * grad * grad;
    const double bc1 = 1.0 - beta1;
    const double bc2 = 1.0 - beta2;
    return param - lr * (m / bc1) / (std::sqrt(v / bc2) + eps);
  };
  CHECK(p.W1(0, 0) == doctest::Approx(expected(before.W1(0, 0), 2.0)).epsilon(1e-14));
  CHECK(p.b1(0) == doctest::Approx(expected(0.0, -0.5)).epsilon(1e-14));
  CHECK(p.W2(0, 0) == doctest::Approx(expected(before.W2(0, 0), 0.25)).epsilon(1e-14));
  CHECK(p.b2(0) == doctest::Approx(expected(0.0, 1.0)).epsilon(1e-14));

  optimizer_step(p, g, lr, beta1, beta2, eps);
  CHECK(p.t == 2);
}

TEST_CASE("optimizer step rejects invalid input") {
  EncoderParams p = init_encoder(2, 2, 2, 1);
  EncoderGrads g;
  g.W1 = Eigen::MatrixXd::Zero(2, 2);
  g.b1 = Eigen::VectorXd::Zero(2);
  g.W2 = Eigen::MatrixXd::Zero(2, 2);
  g.b2 = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(optimizer_step(p, g, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(optimizer_step(p, g, 1e-3, 1.0), std::invalid_argument);

  EncoderGrads bad = g;
  bad.W1(0, 0) = std::nan("");
  CHECK_THROWS_AS(optimizer_step(p, bad, 1e-3), std::invalid_argument);

  EncoderGrads wrong = g;
  wrong.W2 = Eigen::MatrixXd::Zero(3, 2);
  CHECK_THROWS_AS(optimizer_step(p, wrong, 1e-3), std::invalid_argument);
}
