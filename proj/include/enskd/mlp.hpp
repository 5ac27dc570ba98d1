// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "enskd/numerics.hpp"

namespace enskd {

enum class Activation { Relu, Tanh };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

struct MlpArchitecture {
    int input_dim = 2;
    std::vector<int> hidden_dims = {32};
    int num_classes = 3;
    Activation activation = Activation::Relu;

    /// Layer sizes including input and output: [input_dim, hidden..., num_classes].
    std::vector<int> layer_sizes() const;
    bool operator==(const MlpArchitecture&) const = default;
};

/// One dense layer: `weights` is out_dim x in_dim, row-major.
struct LayerParams {
    int in_dim = 0;
    int out_dim = 0;
    std::vector<double> weights;
    std::vector<double> bias;

    double w(int row, int col) const { return weights[static_cast<std::size_t>(row) * in_dim + col]; }
    double& w(int row, int col) { return weights[static_cast<std::size_t>(row) * in_dim + col]; }
};

struct MlpParameters {
    std::vector<LayerParams> layers;

    std::size_t count() const;
    bool shape_congruent(const MlpParameters& other) const;
    bool all_finite() const;
};

/// Holds dL/dtheta, shape-congruent with the parameters it differentiates.
using GradientSet = MlpParameters;

/// Per-layer pre-activations and activations from a forward pass, kept for
/// backpropagation.
struct ForwardCache {
    std::vector<std::vector<double>> pre_activations;   // z_l, one per layer
    std::vector<std::vector<double>> activations;       // a_0 = input, then act(z_l) per hidden layer
};

/// Xavier-uniform initialization: weights ~ U[-a, a] with
/// a = sqrt(6 / (fan_in + fan_out)); biases zero. Deterministic given seed.
MlpParameters init_parameters(const MlpArchitecture& arch, std::uint64_t seed);

/// Forward pass producing logits. Throws on input dimension mismatch.
LogitVector forward(const MlpParameters& params, const std::vector<double>& input);

/// Forward pass that also records the activations needed by backward().
LogitVector forward_cached(const MlpParameters& params, const std::vector<double>& input,
                           ForwardCache& cache, Activation activation);

/// Exact analytic gradients of the network given dL/dlogits.
/// `cache` must come from forward_cached on the same (params, input).
GradientSet backward(const MlpParameters& params, const ForwardCache& cache,
                     const std::vector<double>& upstream, Activation activation);

/// Convenience: forward + backward in one call.
GradientSet backward(const MlpParameters& params, const std::vector<double>& input,
                     const std::vector<double>& upstream, Activation activation);

GradientSet zero_gradients(const MlpParameters& params);

/// acc += g, elementwise. Shapes must match.
void accumulate(GradientSet& acc, const GradientSet& g);

/// g *= s, elementwise.
void scale(GradientSet& g, double s);

}  // namespace enskd
