// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "enskd/mlp.hpp"

namespace enskd {

/// theta <- theta - lr * g. Throws "diverged" on non-finite gradients or if
/// the update would produce non-finite parameters.
void sgd_step(MlpParameters& params, const GradientSet& grads, double lr);

/// Bias-corrected Adam state. Moment accumulators are shape-congruent with
/// the parameters; t counts completed steps.
struct AdamState {
    GradientSet m;
    GradientSet v;
    std::int64_t t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    static AdamState init(const MlpParameters& params,
                          double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);
};

/// Standard bias-corrected Adam update:
///   m <- b1*m + (1-b1)*g;  v <- b2*v + (1-b2)*g^2
///   theta <- theta - lr * m_hat / (sqrt(v_hat) + eps)
/// Throws "diverged" on non-finite gradients or parameters.
void adam_step(MlpParameters& params, const GradientSet& grads, AdamState& state, double lr);

}  // namespace enskd
