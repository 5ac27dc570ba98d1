// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "enskd/data.hpp"
#include "enskd/distill.hpp"
#include "enskd/mlp.hpp"

namespace enskd {

/// Execution backend for the batch kernels. Serial is the reference
/// implementation; OpenMP parallelizes over samples and must produce
/// bit-identical results (per-sample work is independent and the reduction
/// runs in fixed sample order).
enum class ExecMode { Serial, OpenMP };

struct SampleLoss {
    LossBreakdown breakdown;
    std::vector<double> logit_grad;  // dL/dlogits for this sample
};

/// Per-sample objective: maps (index into the batch's source pool, student
/// prediction) to the sample's loss and logit gradient. Must be pure; it is
/// called concurrently under ExecMode::OpenMP.
using SampleLossFn = std::function<SampleLoss(std::size_t, const ProbVector&)>;

struct BatchGradResult {
    GradientSet mean_grad;
    double mean_total = 0.0;
    std::vector<LossBreakdown> breakdowns;  // in batch order
};

/// Mean gradient and per-sample losses over one index batch.
BatchGradResult batch_gradient(const MlpParameters& params, Activation activation,
                               const std::vector<std::vector<double>>& features,
                               std::span<const std::size_t> batch, const SampleLossFn& loss_fn,
                               ExecMode mode);

/// Softmax predictions for every row of `features`.
std::vector<ProbVector> predict_probs(const MlpParameters& params, Activation activation,
                                      const std::vector<std::vector<double>>& features,
                                      ExecMode mode);

/// Number of rows whose argmax prediction matches the label.
std::size_t count_correct(const MlpParameters& params, Activation activation,
                          const std::vector<LabeledExample>& examples, ExecMode mode);

double evaluate_accuracy(const MlpParameters& params, Activation activation,
                         const std::vector<LabeledExample>& examples, ExecMode mode);

std::size_t argmax(const ProbVector& p);

}  // namespace enskd
