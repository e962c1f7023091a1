#pragma once

// Dense feed-forward Q-network: ReLU hidden layers, linear output, MSE TD loss,
// Adam, and Polyak (soft) target tracking. Double precision throughout.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lavp/random.hpp"

namespace lavp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Layer l maps rows of width weights[l].rows() to width weights[l].cols().
/// Also used as the container for gradients and Adam moments.
struct Network {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;

    std::size_t layer_count() const { return weights.size(); }
    std::size_t input_size() const { return weights.empty() ? 0 : weights.front().rows(); }
    std::size_t output_size() const { return weights.empty() ? 0 : weights.back().cols(); }
    std::vector<std::size_t> sizes() const;
    std::size_t parameter_count() const;
    bool same_shape(const Network& other) const;
    bool all_finite() const;

    /// Zero-filled network of the same shape.
    Network zeros_like() const;

    friend bool operator==(const Network& a, const Network& b);
};

/// Hidden widths of the Q-network.
inline const std::vector<std::size_t> kDefaultHidden = {400, 300, 300};

/// Glorot-uniform weights (bound sqrt(6 / (fan_in + fan_out))), zero biases.
Network init_network(std::span<const std::size_t> sizes, Rng& rng);

struct ForwardCache {
    std::vector<Matrix> inputs;          // input to each layer (inputs[0] = batch)
    std::vector<Matrix> pre_activations; // affine output of each layer
};

struct ForwardPass {
    Matrix q; // batch x outputs
    ForwardCache cache;
};

/// Throws ShapeMismatch if `inputs.cols()` differs from the first layer width.
ForwardPass forward(const Network& net, const Matrix& inputs);

/// Forward pass without keeping the cache.
Matrix predict(const Network& net, const Matrix& inputs);

/// Gradient of mean_i (td_i)^2 where td_i = target_i - Q(s_i, a_i); only the
/// taken action's output contributes for each sample.
Network gradients(const Network& net, const ForwardCache& cache,
                  std::span<const std::size_t> actions, std::span<const double> td_errors);

/// Mean squared TD error of the taken actions against `targets`.
double td_loss(const Network& net, const Matrix& inputs, std::span<const std::size_t> actions,
               std::span<const double> targets);

struct AdamState {
    Network first_moment;
    Network second_moment;
    long long step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double learning_rate = 3e-4;
};

AdamState make_adam(const Network& net, double learning_rate);

/// One bias-corrected Adam update of `params` in place.
void adam_step(Network& params, const Network& grads, AdamState& adam);

/// target <- tau * evaluation + (1 - tau) * target.
void soft_update(Network& target, const Network& evaluation, double tau);

} // namespace lavp
