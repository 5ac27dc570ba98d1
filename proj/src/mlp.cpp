// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0

#include "enskd/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "enskd/rng.hpp"

namespace enskd {

std::string to_string(Activation a) {
    return a == Activation::Relu ? "relu" : "tanh";
}

Activation activation_from_string(const std::string& s) {
    if (s == "relu") return Activation::Relu;
    if (s == "tanh") return Activation::Tanh;
    throw std::invalid_argument("unknown activation '" + s + "' (expected relu or tanh)");
}

std::vector<int> MlpArchitecture::layer_sizes() const {
    std::vector<int> sizes;
    sizes.push_back(input_dim);
    for (int h : hidden_dims) sizes.push_back(h);
    sizes.push_back(num_classes);
    return sizes;
}

std::size_t MlpParameters::count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.size() + l.bias.size();
    return n;
}

bool MlpParameters::shape_congruent(const MlpParameters& other) const {
    if (layers.size() != other.layers.size()) return false;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].in_dim != other.layers[i].in_dim ||
            layers[i].out_dim != other.layers[i].out_dim) {
            return false;
        }
    }
    return true;
}

bool MlpParameters::all_finite() const {
    for (const auto& l : layers) {
        for (double x : l.weights) {
            if (!std::isfinite(x)) return false;
        }
        for (double x : l.bias) {
            if (!std::isfinite(x)) return false;
        }
    }
    return true;
}

MlpParameters init_parameters(const MlpArchitecture& arch, std::uint64_t seed) {
    if (arch.input_dim < 1 || arch.num_classes < 2) {
        throw std::invalid_argument("invalid architecture");
    }
    for (int h : arch.hidden_dims) {
        if (h < 1) throw std::invalid_argument("invalid architecture: non-positive hidden dim");
    }
    Rng rng(seed);
    const auto sizes = arch.layer_sizes();
    MlpParameters params;
    params.layers.resize(sizes.size() - 1);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        LayerParams& layer = params.layers[l];
        layer.in_dim = sizes[l];
        layer.out_dim = sizes[l + 1];
        const double a = std::sqrt(6.0 / (layer.in_dim + layer.out_dim));
        layer.weights.resize(static_cast<std::size_t>(layer.in_dim) * layer.out_dim);
        for (double& w : layer.weights) w = rng.uniform(-a, a);
        layer.bias.assign(layer.out_dim, 0.0);
    }
    return params;
}

namespace {

inline double apply_act(double z, Activation a) {
    if (a == Activation::Relu) return z > 0.0 ? z : 0.0;
    return std::tanh(z);
}

// Derivative of the activation in terms of pre-activation z. ReLU subgradient
// at 0 is defined as 0.
inline double act_grad(double z, Activation a) {
    if (a == Activation::Relu) return z > 0.0 ? 1.0 : 0.0;
    const double t = std::tanh(z);
    return 1.0 - t * t;
}

void affine(const LayerParams& layer, const std::vector<double>& in, std::vector<double>& out) {
    out.assign(layer.out_dim, 0.0);
    for (int r = 0; r < layer.out_dim; ++r) {
        double acc = layer.bias[r];
        const double* wrow = layer.weights.data() + static_cast<std::size_t>(r) * layer.in_dim;
        for (int c = 0; c < layer.in_dim; ++c) acc += wrow[c] * in[c];
        out[r] = acc;
    }
}

}  // namespace

LogitVector forward(const MlpParameters& params, const std::vector<double>& input) {
    // Activation choice only matters when hidden layers exist; relu/tanh agree
    // on the final (linear) layer. Callers that care pass through forward_cached.
    ForwardCache cache;
    return forward_cached(params, input, cache, Activation::Relu);
}

LogitVector forward_cached(const MlpParameters& params, const std::vector<double>& input,
                           ForwardCache& cache, Activation activation) {
    if (params.layers.empty()) throw std::invalid_argument("empty parameter set");
    if (static_cast<int>(input.size()) != params.layers.front().in_dim) {
        throw std::invalid_argument("input dimension mismatch");
    }
    cache.pre_activations.assign(params.layers.size(), {});
    cache.activations.assign(params.layers.size(), {});
    cache.activations[0] = input;
    std::vector<double> cur = input;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        if (static_cast<int>(cur.size()) != params.layers[l].in_dim) {
            throw std::invalid_argument("layer dimension mismatch");
        }
        cache.activations[l] = cur;
        affine(params.layers[l], cur, cache.pre_activations[l]);
        if (l + 1 < params.layers.size()) {
            cur.assign(params.layers[l].out_dim, 0.0);
            for (int i = 0; i < params.layers[l].out_dim; ++i) {
                cur[i] = apply_act(cache.pre_activations[l][i], activation);
            }
        } else {
            cur = cache.pre_activations[l];
        }
    }
    return LogitVector(std::move(cur));
}

GradientSet backward(const MlpParameters& params, const ForwardCache& cache,
                     const std::vector<double>& upstream, Activation activation) {
    if (params.layers.empty()) throw std::invalid_argument("empty parameter set");
    if (static_cast<int>(upstream.size()) != params.layers.back().out_dim) {
        throw std::invalid_argument("upstream dimension mismatch");
    }
    GradientSet grads = zero_gradients(params);
    std::vector<double> delta = upstream;  // dL/dz for the current layer
    for (std::size_t li = params.layers.size(); li-- > 0;) {
        const LayerParams& layer = params.layers[li];
        const std::vector<double>& a_in = cache.activations[li];
        LayerParams& g = grads.layers[li];
        for (int r = 0; r < layer.out_dim; ++r) {
            g.bias[r] = delta[r];
            double* grow = g.weights.data() + static_cast<std::size_t>(r) * layer.in_dim;
            for (int c = 0; c < layer.in_dim; ++c) grow[c] = delta[r] * a_in[c];
        }
        if (li == 0) break;
        // Propagate to the previous layer's activations, then through its activation.
        std::vector<double> prev(layer.in_dim, 0.0);
        for (int c = 0; c < layer.in_dim; ++c) {
            double acc = 0.0;
            for (int r = 0; r < layer.out_dim; ++r) {
                acc += layer.weights[static_cast<std::size_t>(r) * layer.in_dim + c] * delta[r];
            }
            acc *= act_grad(cache.pre_activations[li - 1][c], activation);
            prev[c] = acc;
        }
        delta = std::move(prev);
    }
    return grads;
}

GradientSet backward(const MlpParameters& params, const std::vector<double>& input,
                     const std::vector<double>& upstream, Activation activation) {
    ForwardCache cache;
    forward_cached(params, input, cache, activation);
    return backward(params, cache, upstream, activation);
}

GradientSet zero_gradients(const MlpParameters& params) {
    GradientSet g;
    g.layers.resize(params.layers.size());
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        g.layers[l].in_dim = params.layers[l].in_dim;
        g.layers[l].out_dim = params.layers[l].out_dim;
        g.layers[l].weights.assign(params.layers[l].weights.size(), 0.0);
        g.layers[l].bias.assign(params.layers[l].bias.size(), 0.0);
    }
    return g;
}

void accumulate(GradientSet& acc, const GradientSet& g) {
    if (!acc.shape_congruent(g)) throw std::invalid_argument("gradient shape mismatch");
    for (std::size_t l = 0; l < acc.layers.size(); ++l) {
        for (std::size_t i = 0; i < acc.layers[l].weights.size(); ++i) {
            acc.layers[l].weights[i] += g.layers[l].weights[i];
        }
        for (std::size_t i = 0; i < acc.layers[l].bias.size(); ++i) {
            acc.layers[l].bias[i] += g.layers[l].bias[i];
        }
    }
}

void scale(GradientSet& g, double s) {
    for (auto& layer : g.layers) {
        for (double& x : layer.weights) x *= s;
        for (double& x : layer.bias) x *= s;
    }
}

}  // namespace enskd
