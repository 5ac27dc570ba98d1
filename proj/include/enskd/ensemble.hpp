// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "enskd/numerics.hpp"

namespace enskd {

/// N teachers' soft labels for one sample. Task losses are present only for
/// labeled samples.
struct TeacherPredictionSet {
    std::vector<ProbVector> predictions;
    std::optional<std::vector<double>> task_losses;

    TeacherPredictionSet() = default;
    TeacherPredictionSet(std::vector<ProbVector> preds,
                         std::optional<std::vector<double>> losses = std::nullopt);

    std::size_t num_teachers() const { return predictions.size(); }
    std::size_t num_classes() const { return predictions.front().size(); }
};

/// Per-teacher ensemble coefficients; nonnegative, summing to 1 within 1e-9.
struct EnsembleWeights {
    std::vector<double> weights;

    explicit EnsembleWeights(std::vector<double> w);
};

/// How per-sample teacher losses map to ensemble weights.
///
/// InverseLoss: w_i = (1/(L_i+eps)) / sum_j (1/(L_j+eps)) — a higher loss
/// yields a lower weight. LiteralProportional: w_i = L_i / sum_j L_j — weight
/// proportional to loss, kept for side-by-side comparison (uniform fallback
/// when every loss is zero).
enum class WeightMode { InverseLoss, LiteralProportional };

std::string to_string(WeightMode m);
WeightMode weight_mode_from_string(const std::string& s);

inline constexpr double kEpsWeight = 1e-8;

/// Cross-entropy of one-hot(label) against each teacher's prediction.
std::vector<double> teacher_task_losses(const std::vector<ProbVector>& preds, int label,
                                        double eps_log = kEpsLog);

/// Per-sample correctness weights from teacher task losses.
EnsembleWeights correctness_weights(const std::vector<double>& losses, WeightMode mode,
                                    double eps_w = kEpsWeight);

/// Convex combination sum_i w_i * prediction_i.
ProbVector weighted_ensemble(const TeacherPredictionSet& preds, const EnsembleWeights& weights);

/// Elementwise mean of the teachers' predictions.
ProbVector uniform_ensemble(const TeacherPredictionSet& preds);

/// Mean pairwise KL divergence over ordered teacher pairs:
///   (1/(N(N-1))) * sum_{i != j} KL(pred_i || pred_j).
/// Zero iff all predictions are identical (up to clamping); invariant under
/// teacher permutation.
double disagreement(const TeacherPredictionSet& preds, double eps_log = kEpsLog);

}  // namespace enskd
