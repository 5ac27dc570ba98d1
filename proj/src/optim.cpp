// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0

#include "enskd/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace enskd {

namespace {

void check_step_inputs(const MlpParameters& params, const GradientSet& grads, double lr) {
    if (!params.shape_congruent(grads)) {
        throw std::invalid_argument("gradient shape mismatch");
    }
    if (!(lr > 0.0) || !std::isfinite(lr)) {
        throw std::invalid_argument("learning rate must be positive and finite");
    }
    if (!grads.all_finite()) {
        throw std::runtime_error("diverged: non-finite gradient");
    }
}

void check_result(const MlpParameters& params) {
    if (!params.all_finite()) {
        throw std::runtime_error("diverged: non-finite parameters after update");
    }
}

}  // namespace

void sgd_step(MlpParameters& params, const GradientSet& grads, double lr) {
    check_step_inputs(params, grads, lr);
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        auto& p = params.layers[l];
        const auto& g = grads.layers[l];
        for (std::size_t i = 0; i < p.weights.size(); ++i) p.weights[i] -= lr * g.weights[i];
        for (std::size_t i = 0; i < p.bias.size(); ++i) p.bias[i] -= lr * g.bias[i];
    }
    check_result(params);
}

AdamState AdamState::init(const MlpParameters& params, double beta1, double beta2, double epsilon) {
    AdamState s;
    s.m = zero_gradients(params);
    s.v = zero_gradients(params);
    s.t = 0;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.epsilon = epsilon;
    return s;
}

void adam_step(MlpParameters& params, const GradientSet& grads, AdamState& state, double lr) {
    check_step_inputs(params, grads, lr);
    if (!state.m.shape_congruent(params)) {
        throw std::invalid_argument("optimizer state shape mismatch");
    }
    state.t += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        auto& p = params.layers[l];
        const auto& g = grads.layers[l];
        auto& m = state.m.layers[l];
        auto& v = state.v.layers[l];
        auto update = [&](double& theta, double& mi, double& vi, double gi) {
            mi = state.beta1 * mi + (1.0 - state.beta1) * gi;
            vi = state.beta2 * vi + (1.0 - state.beta2) * gi * gi;
            const double m_hat = mi / bc1;
            const double v_hat = vi / bc2;
            theta -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
        };
        for (std::size_t i = 0; i < p.weights.size(); ++i) {
            update(p.weights[i], m.weights[i], v.weights[i], g.weights[i]);
        }
        for (std::size_t i = 0; i < p.bias.size(); ++i) {
            update(p.bias[i], m.bias[i], v.bias[i], g.bias[i]);
        }
    }
    check_result(params);
}

}  // namespace enskd
