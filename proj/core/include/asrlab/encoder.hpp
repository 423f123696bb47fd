#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace asrlab {

// Two-layer MLP with L2-normalized output rows. Moment accumulators and the
// step counter belong to the parameters so checkpoints capture optimizer
// state.
struct EncoderParams {
  Eigen::MatrixXd W1;  // H_enc x D_in
  Eigen::VectorXd b1;
  Eigen::MatrixXd W2;  // D_out x H_enc
  Eigen::VectorXd b2;
  Eigen::MatrixXd mW1, vW1, mW2, vW2;
  Eigen::VectorXd mb1, vb1, mb2, vb2;
  long t = 0;

  int input_dim() const { return static_cast<int>(W1.cols()); }
  int hidden_dim() const { return static_cast<int>(W1.rows()); }
  int output_dim() const { return static_cast<int>(W2.rows()); }
};

// Glorot-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero biases,
// zero moments.
EncoderParams init_encoder(int input_dim, int hidden_dim, int output_dim,
                           std::uint64_t seed);

// Embeddings plus the activations needed to backpropagate exactly.
struct EmbeddingBatch {
  Eigen::MatrixXd embeddings;  // b x D_out, unit rows
  Eigen::MatrixXd input;       // b x D_in
  Eigen::MatrixXd hidden;      // b x H_enc, post-relu
  Eigen::MatrixXd prenorm;     // b x D_out
};

struct EncoderGrads {
  Eigen::MatrixXd W1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd W2;
  Eigen::VectorXd b2;
};

// Row-wise normalize(W2 relu(W1 x + b1) + b2) with denominator norm + 1e-12.
EmbeddingBatch embed_forward(const EncoderParams& params, const Eigen::MatrixXd& X);

// Exact gradients of sum(grad_embeddings .* embeddings) w.r.t. parameters.
// The batch must come from embed_forward with these params.
EncoderGrads embed_backward(const EmbeddingBatch& batch,
                            const Eigen::MatrixXd& grad_embeddings,
                            const EncoderParams& params);

// Bias-corrected adaptive-moment update; throws on non-finite gradients.
void optimizer_step(EncoderParams& params, const EncoderGrads& grads,
                    double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999,
                    double eps = 1e-8);

}  // namespace asrlab
