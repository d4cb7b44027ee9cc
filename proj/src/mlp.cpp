#include "nsub/mlp.hpp"

#include <cmath>
#include <string>

#include "nsub/error.hpp"

namespace nsub {

MLPParams MLPParams::zeros(int input_dim, int hidden_dim, int output_dim) {
  if (input_dim <= 0 || hidden_dim <= 0 || output_dim <= 0) {
    throw DimensionError("network dimensions must be positive");
  }
  MLPParams p;
  p.weights[0] = Eigen::MatrixXd::Zero(hidden_dim, input_dim);
  p.weights[1] = Eigen::MatrixXd::Zero(hidden_dim, hidden_dim);
  p.weights[2] = Eigen::MatrixXd::Zero(output_dim, hidden_dim);
  p.biases[0] = Eigen::VectorXd::Zero(hidden_dim);
  p.biases[1] = Eigen::VectorXd::Zero(hidden_dim);
  p.biases[2] = Eigen::VectorXd::Zero(output_dim);
  return p;
}

int MLPParams::num_parameters() const {
  int n = 0;
  for (int l = 0; l < 3; ++l) n += static_cast<int>(weights[l].size() + biases[l].size());
  return n;
}

bool MLPParams::all_finite() const {
  for (int l = 0; l < 3; ++l) {
    if (!weights[l].allFinite() || !biases[l].allFinite()) return false;
  }
  return true;
}

std::array<std::span<double>, 6> MLPParams::blocks() {
  std::array<std::span<double>, 6> out;
  for (int l = 0; l < 3; ++l) {
    out[2 * l] = {weights[l].data(), static_cast<size_t>(weights[l].size())};
    out[2 * l + 1] = {biases[l].data(), static_cast<size_t>(biases[l].size())};
  }
  return out;
}

std::array<std::span<const double>, 6> MLPParams::blocks() const {
  std::array<std::span<const double>, 6> out;
  for (int l = 0; l < 3; ++l) {
    out[2 * l] = {weights[l].data(), static_cast<size_t>(weights[l].size())};
    out[2 * l + 1] = {biases[l].data(), static_cast<size_t>(biases[l].size())};
  }
  return out;
}

void MLPParams::set_zero() {
  for (int l = 0; l < 3; ++l) {
    weights[l].setZero();
    biases[l].setZero();
  }
}

MLPParams MLPParams::zeros_like() const {
  return zeros(input_dim(), hidden_dim(), output_dim());
}

void xavier_init(MLPParams& params, std::mt19937_64& rng) {
  for (int l = 0; l < 3; ++l) {
    Eigen::MatrixXd& w = params.weights[l];
    double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    // Row-major fill so the draw order matches the checkpoint layout.
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = dist(rng);
    }
    params.biases[l].setZero();
  }
}

Eigen::MatrixXd mlp_forward(const MLPParams& params, const Eigen::MatrixXd& input, MLPCache* cache) {
  if (input.rows() != params.input_dim()) {
    throw DimensionError("network expects " + std::to_string(params.input_dim()) +
                         " inputs, got " + std::to_string(input.rows()));
  }
  Eigen::MatrixXd h1 = params.weights[0] * input;
  h1.colwise() += params.biases[0];
  h1 = h1.cwiseMax(0.0);
  Eigen::MatrixXd h2 = params.weights[1] * h1;
  h2.colwise() += params.biases[1];
  h2 = h2.cwiseMax(0.0);
  Eigen::MatrixXd out = params.weights[2] * h2;
  out.colwise() += params.biases[2];
  if (cache) {
    cache->input = input;
    cache->hidden1 = std::move(h1);
    cache->hidden2 = std::move(h2);
  }
  return out;
}

Eigen::MatrixXd mlp_forward(const MLPParams& params, MLPCache& cache) {
  if (cache.input.rows() != params.input_dim()) {
    throw DimensionError("network expects " + std::to_string(params.input_dim()) +
                         " inputs, got " + std::to_string(cache.input.rows()));
  }
  cache.hidden1 = params.weights[0] * cache.input;
  cache.hidden1.colwise() += params.biases[0];
  cache.hidden1 = cache.hidden1.cwiseMax(0.0);
  cache.hidden2 = params.weights[1] * cache.hidden1;
  cache.hidden2.colwise() += params.biases[1];
  cache.hidden2 = cache.hidden2.cwiseMax(0.0);
  Eigen::MatrixXd out = params.weights[2] * cache.hidden2;
  out.colwise() += params.biases[2];
  return out;
}

void mlp_backward(const MLPParams& params, const MLPCache& cache, const Eigen::MatrixXd& d_output,
                  MLPParams& grad, Eigen::MatrixXd* d_input) {
  if (d_output.rows() != params.output_dim() || d_output.cols() != cache.input.cols()) {
    throw DimensionError("upstream gradient shape does not match the forward pass");
  }
  grad.weights[2].noalias() += d_output * cache.hidden2.transpose();
  grad.biases[2] += d_output.rowwise().sum();
  Eigen::MatrixXd d2 = params.weights[2].transpose() * d_output;
  d2 = (cache.hidden2.array() > 0.0).select(d2, 0.0);
  grad.weights[1].noalias() += d2 * cache.hidden1.transpose();
  grad.biases[1] += d2.rowwise().sum();
  Eigen::MatrixXd d1 = params.weights[1].transpose() * d2;
  d1 = (cache.hidden1.array() > 0.0).select(d1, 0.0);
  grad.weights[0].noalias() += d1 * cache.input.transpose();
  grad.biases[0] += d1.rowwise().sum();
  if (d_input) *d_input = params.weights[0].transpose() * d1;
}

MLPEvaluation mlp_apply(const MLPParams& params, const Eigen::VectorXd& x) {
  MLPEvaluation out;
  out.output = mlp_forward(params, x);
  return out;
}

MLPEvaluation mlp_apply(const MLPParams& params, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& d_output) {
  MLPCache cache;
  MLPEvaluation out;
  out.output = mlp_forward(params, x, &cache);
  out.grad = params.zeros_like();
  Eigen::MatrixXd dx;
  mlp_backward(params, cache, d_output, out.grad, &dx);
  out.d_input = dx;
  return out;
}

}  // namespace nsub
