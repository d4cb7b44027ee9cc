#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace nsub {

/// Fully connected in -> hidden -> hidden -> out network with ReLU on the
/// hidden layers and a linear output layer.
struct MLPParams {
  std::array<Eigen::MatrixXd, 3> weights;
  std::array<Eigen::VectorXd, 3> biases;

  static MLPParams zeros(int input_dim, int hidden_dim, int output_dim);

  int input_dim() const { return static_cast<int>(weights[0].cols()); }
  int hidden_dim() const { return static_cast<int>(weights[0].rows()); }
  int output_dim() const { return static_cast<int>(weights[2].rows()); }
  int num_parameters() const;
  bool all_finite() const;

  /// W1, b1, W2, b2, W3, b3 as flat column-major views.
  std::array<std::span<double>, 6> blocks();
  std::array<std::span<const double>, 6> blocks() const;

  void set_zero();
  MLPParams zeros_like() const;
};

/// Uniform in +-sqrt(6 / (fan_in + fan_out)), zero biases.
void xavier_init(MLPParams& params, std::mt19937_64& rng);

/// Activations kept by a batched forward pass for the backward pass.
struct MLPCache {
  Eigen::MatrixXd input;    ///< in x N
  Eigen::MatrixXd hidden1;  ///< after ReLU
  Eigen::MatrixXd hidden2;  ///< after ReLU
};

/// Evaluates the network on every column of `input` (in x N). Throws
/// DimensionError when the row count does not match.
Eigen::MatrixXd mlp_forward(const MLPParams& params, const Eigen::MatrixXd& input,
                            MLPCache* cache = nullptr);

/// Same, reading the input from (and recording activations in) `cache`.
Eigen::MatrixXd mlp_forward(const MLPParams& params, MLPCache& cache);

/// Accumulates parameter gradients into `grad` for upstream gradient
/// `d_output` (out x N). Writes the input gradient when `d_input` is given.
/// The ReLU derivative at exactly 0 is taken to be 0.
void mlp_backward(const MLPParams& params, const MLPCache& cache,
                  const Eigen::MatrixXd& d_output, MLPParams& grad,
                  Eigen::MatrixXd* d_input = nullptr);

struct MLPEvaluation {
  Eigen::VectorXd output;
  MLPParams grad;           ///< empty unless backward was requested
  Eigen::VectorXd d_input;  ///< empty unless backward was requested
};

/// Single-vector forward pass.
MLPEvaluation mlp_apply(const MLPParams& params, const Eigen::VectorXd& x);
/// Forward plus backward for upstream gradient `d_output`.
MLPEvaluation mlp_apply(const MLPParams& params, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& d_output);

}  // namespace nsub
