#pragma once

// Dense feedforward network with the two reverse passes the control schemes
// need: one into the parameters, one into the inputs of a frozen network.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ncb/error.hpp"

namespace ncb {

enum class Activation { linear, tanh };

inline const char* to_string(Activation a) {
    return a == Activation::tanh ? "tanh" : "linear";
}

template <typename Scalar>
struct DenseLayer {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Matrix weights;  // out x in
    Vector bias;     // out
    Activation activation = Activation::linear;
};

template <typename Scalar>
class Mlp {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Layer = DenseLayer<Scalar>;

    Mlp() = default;

    explicit Mlp(std::vector<Layer> layers) : layers_(std::move(layers)) { validate(); }

    // Uniform weights in [-init_scale, init_scale], zero biases. `dims` lists
    // the input width followed by every layer's output width.
    static Mlp random(std::span<const int> dims, std::span<const Activation> activations,
                      std::uint64_t seed, Scalar init_scale = Scalar(0.3)) {
        if (dims.size() < 2) throw ShapeError("mlp needs at least an input and an output width");
        if (activations.size() != dims.size() - 1)
            throw ShapeError("mlp: " + std::to_string(activations.size()) + " activations for " +
                             std::to_string(dims.size() - 1) + " layers");
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(-double(init_scale), double(init_scale));
        std::vector<Layer> layers;
        layers.reserve(activations.size());
        for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
            if (dims[l] <= 0 || dims[l + 1] <= 0) throw ShapeError("mlp: layer widths must be positive");
            Layer layer;
            layer.weights.resize(dims[l + 1], dims[l]);
            for (Eigen::Index c = 0; c < layer.weights.cols(); ++c)
                for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
                    layer.weights(r, c) = Scalar(dist(rng));
            layer.bias = Vector::Zero(dims[l + 1]);
            layer.activation = activations[l];
            layers.push_back(std::move(layer));
        }
        return Mlp(std::move(layers));
    }

    static Mlp random(std::initializer_list<int> dims, std::initializer_list<Activation> activations,
                      std::uint64_t seed, Scalar init_scale = Scalar(0.3)) {
        return random(std::span<const int>(dims.begin(), dims.size()),
                      std::span<const Activation>(activations.begin(), activations.size()), seed,
                      init_scale);
    }

    Eigen::Index input_dim() const { return layers_.empty() ? 0 : layers_.front().weights.cols(); }
    Eigen::Index output_dim() const { return layers_.empty() ? 0 : layers_.back().weights.rows(); }
    std::size_t depth() const { return layers_.size(); }

    const std::vector<Layer>& layers() const { return layers_; }
    std::vector<Layer>& layers() { return layers_; }

    Eigen::Index parameter_count() const {
        Eigen::Index n = 0;
        for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
        return n;
    }

    // Output only; use forward() when a backward pass follows.
    Vector operator()(const Vector& x) const {
        check_input(x);
        Vector a = x;
        for (const auto& l : layers_) a = activate(l.activation, l.weights * a + l.bias);
        return a;
    }

    void check_input(const Vector& x) const {
        if (layers_.empty()) throw ShapeError("mlp has no layers");
        if (x.size() != input_dim())
            throw ShapeError("mlp input has length " + std::to_string(x.size()) + ", expected " +
                             std::to_string(input_dim()));
    }

    static Vector activate(Activation a, const Vector& pre) {
        if (a == Activation::tanh) return pre.array().tanh().matrix();
        return pre;
    }

private:
    void validate() const {
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            const auto& layer = layers_[l];
            if (layer.bias.size() != layer.weights.rows())
                throw ShapeError("layer " + std::to_string(l) + ": bias length does not match rows");
            if (l > 0 && layer.weights.cols() != layers_[l - 1].weights.rows())
                throw ShapeError("layer " + std::to_string(l) + " does not chain with its predecessor");
            if (!layer.weights.allFinite() || !layer.bias.allFinite())
                throw ShapeError("layer " + std::to_string(l) + " has non-finite parameters");
        }
    }

    std::vector<Layer> layers_;
};

// inputs[l] feeds layer l; outputs[l] is its post-activation value.
template <typename Scalar>
struct ForwardCache {
    std::vector<typename Mlp<Scalar>::Vector> inputs;
    std::vector<typename Mlp<Scalar>::Vector> outputs;
};

template <typename Scalar>
struct ForwardResult {
    typename Mlp<Scalar>::Vector output;
    ForwardCache<Scalar> cache;
};

template <typename Scalar>
struct Gradients {
    std::vector<typename Mlp<Scalar>::Matrix> weights;
    std::vector<typename Mlp<Scalar>::Vector> bias;
    typename Mlp<Scalar>::Vector input;
};

template <typename Scalar>
ForwardResult<Scalar> forward(const Mlp<Scalar>& net, const typename Mlp<Scalar>::Vector& x) {
    net.check_input(x);
    ForwardResult<Scalar> result;
    result.cache.inputs.reserve(net.depth());
    result.cache.outputs.reserve(net.depth());
    typename Mlp<Scalar>::Vector a = x;
    for (const auto& l : net.layers()) {
        result.cache.inputs.push_back(a);
        a = Mlp<Scalar>::activate(l.activation, l.weights * a + l.bias);
        result.cache.outputs.push_back(a);
    }
    result.output = a;
    return result;
}

namespace detail {

template <typename Scalar>
void check_cache(const Mlp<Scalar>& net, const ForwardCache<Scalar>& cache,
                 const typename Mlp<Scalar>::Vector& dL_dy) {
    const auto& layers = net.layers();
    if (cache.inputs.size() != layers.size() || cache.outputs.size() != layers.size())
        throw ShapeError("forward cache does not belong to this network");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        if (cache.inputs[l].size() != layers[l].weights.cols() ||
            cache.outputs[l].size() != layers[l].weights.rows())
            throw ShapeError("forward cache does not belong to this network");
    }
    if (dL_dy.size() != net.output_dim())
        throw ShapeError("output gradient has length " + std::to_string(dL_dy.size()) +
                         ", expected " + std::to_string(net.output_dim()));
}

// Gradient w.r.t. the pre-activation of layer l given the gradient w.r.t. its output.
template <typename Scalar>
typename Mlp<Scalar>::Vector through_activation(Activation a, const typename Mlp<Scalar>::Vector& out,
                                                const typename Mlp<Scalar>::Vector& grad_out) {
    if (a == Activation::tanh)
        return (grad_out.array() * (Scalar(1) - out.array().square())).matrix();
    return grad_out;
}

}  // namespace detail

// Reverse pass into every weight and bias; also fills the input gradient.
template <typename Scalar>
Gradients<Scalar> backward_weights(const Mlp<Scalar>& net, const ForwardCache<Scalar>& cache,
                                   const typename Mlp<Scalar>::Vector& dL_dy) {
    detail::check_cache(net, cache, dL_dy);
    const auto& layers = net.layers();
    Gradients<Scalar> g;
    g.weights.resize(layers.size());
    g.bias.resize(layers.size());
    typename Mlp<Scalar>::Vector delta = dL_dy;
    for (std::size_t i = layers.size(); i-- > 0;) {
        const auto& layer = layers[i];
        typename Mlp<Scalar>::Vector pre =
            detail::through_activation<Scalar>(layer.activation, cache.outputs[i], delta);
        g.weights[i].noalias() = pre * cache.inputs[i].transpose();
        g.bias[i] = pre;
        delta = layer.weights.transpose() * pre;
    }
    g.input = std::move(delta);
    return g;
}

// Reverse pass into the inputs only. The network is not touched.
template <typename Scalar>
typename Mlp<Scalar>::Vector backward_inputs(const Mlp<Scalar>& net, const ForwardCache<Scalar>& cache,
                                             const typename Mlp<Scalar>::Vector& dL_dy) {
    detail::check_cache(net, cache, dL_dy);
    const auto& layers = net.layers();
    typename Mlp<Scalar>::Vector delta = dL_dy;
    for (std::size_t i = layers.size(); i-- > 0;) {
        delta = layers[i].weights.transpose() *
                detail::through_activation<Scalar>(layers[i].activation, cache.outputs[i], delta);
    }
    return delta;
}

// Plain steepest descent: p <- p - rate * dL/dp. No state carried between calls.
template <typename Scalar>
void sgd_step(Mlp<Scalar>& net, const Gradients<Scalar>& grads, Scalar rate) {
    auto& layers = net.layers();
    if (grads.weights.size() != layers.size() || grads.bias.size() != layers.size())
        throw ShapeError("gradient set has " + std::to_string(grads.weights.size()) +
                         " layers, network has " + std::to_string(layers.size()));
    for (std::size_t l = 0; l < layers.size(); ++l) {
        if (grads.weights[l].rows() != layers[l].weights.rows() ||
            grads.weights[l].cols() != layers[l].weights.cols() ||
            grads.bias[l].size() != layers[l].bias.size())
            throw ShapeError("gradient shape mismatch at layer " + std::to_string(l));
    }
    if (rate == Scalar(0)) return;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        layers[l].weights -= rate * grads.weights[l];
        layers[l].bias -= rate * grads.bias[l];
    }
}

// All parameters, layer by layer, weights column-major then bias.
template <typename Scalar>
typename Mlp<Scalar>::Vector flatten_parameters(const Mlp<Scalar>& net) {
    typename Mlp<Scalar>::Vector p(net.parameter_count());
    Eigen::Index at = 0;
    for (const auto& l : net.layers()) {
        p.segment(at, l.weights.size()) = l.weights.reshaped();
        at += l.weights.size();
        p.segment(at, l.bias.size()) = l.bias;
        at += l.bias.size();
    }
    return p;
}

template <typename Scalar>
void assign_parameters(Mlp<Scalar>& net, const typename Mlp<Scalar>::Vector& p) {
    if (p.size() != net.parameter_count()) throw ShapeError("parameter vector length mismatch");
    Eigen::Index at = 0;
    for (auto& l : net.layers()) {
        l.weights.reshaped() = p.segment(at, l.weights.size());
        at += l.weights.size();
        l.bias = p.segment(at, l.bias.size());
        at += l.bias.size();
    }
}

template <typename Scalar>
Gradients<Scalar> zero_gradients(const Mlp<Scalar>& net) {
    Gradients<Scalar> g;
    for (const auto& l : net.layers()) {
        g.weights.push_back(Mlp<Scalar>::Matrix::Zero(l.weights.rows(), l.weights.cols()));
        g.bias.push_back(Mlp<Scalar>::Vector::Zero(l.bias.size()));
    }
    g.input = Mlp<Scalar>::Vector::Zero(net.input_dim());
    return g;
}

// FNV-1a over the raw parameter bytes and layer shapes.
template <typename Scalar>
std::uint64_t parameter_hash(const Mlp<Scalar>& net) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const void* data, std::size_t n) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= bytes[i];
            h *= 1099511628211ULL;
        }
    };
    for (const auto& l : net.layers()) {
        const std::int64_t shape[3] = {l.weights.rows(), l.weights.cols(), static_cast<std::int64_t>(l.activation)};
        mix(shape, sizeof shape);
        mix(l.weights.data(), sizeof(Scalar) * std::size_t(l.weights.size()));
        mix(l.bias.data(), sizeof(Scalar) * std::size_t(l.bias.size()));
    }
    return h;
}

template <typename Scalar>
Scalar max_abs_parameter(const Mlp<Scalar>& net) {
    Scalar m(0);
    for (const auto& l : net.layers()) {
        if (l.weights.size()) m = std::max(m, l.weights.cwiseAbs().maxCoeff());
        if (l.bias.size()) m = std::max(m, l.bias.cwiseAbs().maxCoeff());
    }
    return m;
}

// Same network in another scalar type (e.g. long double for reference checks).
template <typename To, typename From>
Mlp<To> scalar_cast(const Mlp<From>& net) {
    std::vector<DenseLayer<To>> layers;
    layers.reserve(net.depth());
    for (const auto& l : net.layers())
        layers.push_back({l.weights.template cast<To>(), l.bias.template cast<To>(), l.activation});
    return Mlp<To>(std::move(layers));
}

using Mlpd = Mlp<double>;
using Gradientsd = Gradients<double>;
using ForwardCached = ForwardCache<double>;

}  // namespace ncb
