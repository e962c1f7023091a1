#include "lavp/neural.hpp"

#include <cmath>
#include <string>

#include "lavp/errors.hpp"

namespace lavp {

std::vector<std::size_t> Network::sizes() const {
    std::vector<std::size_t> out;
    if (weights.empty()) return out;
    out.push_back(static_cast<std::size_t>(weights.front().rows()));
    for (const Matrix& w : weights) out.push_back(static_cast<std::size_t>(w.cols()));
    return out;
}

std::size_t Network::parameter_count() const {
    std::size_t total = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        total += static_cast<std::size_t>(weights[l].size() + biases[l].size());
    }
    return total;
}

bool Network::same_shape(const Network& other) const {
    if (weights.size() != other.weights.size() || biases.size() != other.biases.size()) {
        return false;
    }
    for (std::size_t l = 0; l < weights.size(); ++l) {
        if (weights[l].rows() != other.weights[l].rows() ||
            weights[l].cols() != other.weights[l].cols() ||
            biases[l].size() != other.biases[l].size()) {
            return false;
        }
    }
    return true;
}

bool Network::all_finite() const {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        if (!weights[l].allFinite() || !biases[l].allFinite()) return false;
    }
    return true;
}

Network Network::zeros_like() const {
    Network out;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        out.weights.push_back(Matrix::Zero(weights[l].rows(), weights[l].cols()));
        out.biases.push_back(Vector::Zero(biases[l].size()));
    }
    return out;
}

bool operator==(const Network& a, const Network& b) {
    if (!a.same_shape(b)) return false;
    for (std::size_t l = 0; l < a.weights.size(); ++l) {
        if (a.weights[l] != b.weights[l] || a.biases[l] != b.biases[l]) return false;
    }
    return true;
}

Network init_network(std::span<const std::size_t> sizes, Rng& rng) {
    if (sizes.size() < 2) {
        throw ShapeMismatch("a network needs at least an input and an output width");
    }
    Network net;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const auto fan_in = static_cast<Eigen::Index>(sizes[l]);
        const auto fan_out = static_cast<Eigen::Index>(sizes[l + 1]);
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-bound, bound);
        Matrix w(fan_in, fan_out);
        for (Eigen::Index r = 0; r < fan_in; ++r) {
            for (Eigen::Index c = 0; c < fan_out; ++c) w(r, c) = dist(rng);
        }
        net.weights.push_back(std::move(w));
        net.biases.push_back(Vector::Zero(fan_out));
    }
    return net;
}

namespace {

void check_input(const Network& net, const Matrix& inputs) {
    if (net.weights.empty()) throw ShapeMismatch("network has no layers");
    if (static_cast<std::size_t>(inputs.cols()) != net.input_size()) {
        throw ShapeMismatch("input width " + std::to_string(inputs.cols()) +
                            " does not match network input " + std::to_string(net.input_size()));
    }
}

} // namespace

ForwardPass forward(const Network& net, const Matrix& inputs) {
    check_input(net, inputs);
    ForwardPass out;
    const std::size_t layers = net.layer_count();
    out.cache.inputs.reserve(layers);
    out.cache.pre_activations.reserve(layers);
    Matrix act = inputs;
    for (std::size_t l = 0; l < layers; ++l) {
        Matrix z = act * net.weights[l];
        z.rowwise() += net.biases[l].transpose();
        out.cache.inputs.push_back(std::move(act));
        act = (l + 1 < layers) ? Matrix(z.cwiseMax(0.0)) : z;
        out.cache.pre_activations.push_back(std::move(z));
    }
    out.q = std::move(act);
    return out;
}

Matrix predict(const Network& net, const Matrix& inputs) {
    check_input(net, inputs);
    Matrix act = inputs;
    const std::size_t layers = net.layer_count();
    for (std::size_t l = 0; l < layers; ++l) {
        Matrix z = act * net.weights[l];
        z.rowwise() += net.biases[l].transpose();
        act = (l + 1 < layers) ? Matrix(z.cwiseMax(0.0)) : std::move(z);
    }
    return act;
}

Network gradients(const Network& net, const ForwardCache& cache,
                  std::span<const std::size_t> actions, std::span<const double> td_errors) {
    const std::size_t layers = net.layer_count();
    if (cache.inputs.size() != layers || cache.pre_activations.size() != layers) {
        throw ShapeMismatch("forward cache does not match the network depth");
    }
    const Eigen::Index batch = cache.inputs.front().rows();
    if (actions.size() != static_cast<std::size_t>(batch) || td_errors.size() != actions.size()) {
        throw ShapeMismatch("actions / td_errors must have one entry per batch row");
    }

    // dL/dQ(s_i, a_i) = -2 td_i / B; zero for the other actions.
    Matrix delta = Matrix::Zero(batch, static_cast<Eigen::Index>(net.output_size()));
    const double scale = -2.0 / static_cast<double>(batch);
    for (Eigen::Index i = 0; i < batch; ++i) {
        const std::size_t a = actions[static_cast<std::size_t>(i)];
        if (a >= net.output_size()) throw ShapeMismatch("action index out of range");
        delta(i, static_cast<Eigen::Index>(a)) = scale * td_errors[static_cast<std::size_t>(i)];
    }

    Network grads;
    grads.weights.resize(layers);
    grads.biases.resize(layers);
    for (std::size_t l = layers; l-- > 0;) {
        grads.weights[l].noalias() = cache.inputs[l].transpose() * delta;
        grads.biases[l] = delta.colwise().sum().transpose();
        if (l > 0) {
            Matrix back = delta * net.weights[l].transpose();
            delta = back.cwiseProduct(
                (cache.pre_activations[l - 1].array() > 0.0).cast<double>().matrix());
        }
    }
    return grads;
}

double td_loss(const Network& net, const Matrix& inputs, std::span<const std::size_t> actions,
               std::span<const double> targets) {
    const Matrix q = predict(net, inputs);
    if (actions.size() != static_cast<std::size_t>(q.rows()) || targets.size() != actions.size()) {
        throw ShapeMismatch("actions / targets must have one entry per batch row");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        const double td = targets[i] - q(static_cast<Eigen::Index>(i),
                                         static_cast<Eigen::Index>(actions[i]));
        sum += td * td;
    }
    return sum / static_cast<double>(actions.size());
}

AdamState make_adam(const Network& net, double learning_rate) {
    AdamState adam;
    adam.first_moment = net.zeros_like();
    adam.second_moment = net.zeros_like();
    adam.learning_rate = learning_rate;
    return adam;
}

namespace {

template <typename Param>
void adam_update(Param& p, const Param& g, Param& m, Param& v, const AdamState& adam,
                 double correction1, double correction2) {
    m = adam.beta1 * m + (1.0 - adam.beta1) * g;
    v = adam.beta2 * v + (1.0 - adam.beta2) * g.cwiseProduct(g);
    p.array() -= adam.learning_rate * (m.array() / correction1) /
                 ((v.array() / correction2).sqrt() + adam.epsilon);
}

} // namespace

void adam_step(Network& params, const Network& grads, AdamState& adam) {
    if (!params.same_shape(grads) || !params.same_shape(adam.first_moment) ||
        !params.same_shape(adam.second_moment)) {
        throw ShapeMismatch("adam_step: parameter, gradient and moment shapes differ");
    }
    ++adam.step;
    const double c1 = 1.0 - std::pow(adam.beta1, static_cast<double>(adam.step));
    const double c2 = 1.0 - std::pow(adam.beta2, static_cast<double>(adam.step));
    for (std::size_t l = 0; l < params.layer_count(); ++l) {
        adam_update(params.weights[l], grads.weights[l], adam.first_moment.weights[l],
                    adam.second_moment.weights[l], adam, c1, c2);
        adam_update(params.biases[l], grads.biases[l], adam.first_moment.biases[l],
                    adam.second_moment.biases[l], adam, c1, c2);
    }
}

void soft_update(Network& target, const Network& evaluation, double tau) {
    if (!target.same_shape(evaluation)) {
        throw ShapeMismatch("soft_update: target and evaluation shapes differ");
    }
    for (std::size_t l = 0; l < target.layer_count(); ++l) {
        target.weights[l] = tau * evaluation.weights[l] + (1.0 - tau) * target.weights[l];
        target.biases[l] = tau * evaluation.biases[l] + (1.0 - tau) * target.biases[l];
    }
}

} // namespace lavp
