// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0

#include "enskd/ensemble.hpp"

#include <cmath>
#include <stdexcept>

namespace enskd {

TeacherPredictionSet::TeacherPredictionSet(std::vector<ProbVector> preds,
                                           std::optional<std::vector<double>> losses)
    : predictions(std::move(preds)), task_losses(std::move(losses)) {
    if (predictions.size() < 2) {
        throw std::invalid_argument("TeacherPredictionSet requires N >= 2 teachers");
    }
    const std::size_t c = predictions.front().size();
    for (const auto& p : predictions) {
        if (p.size() != c) throw std::invalid_argument("class-count mismatch");
    }
    if (task_losses) {
        if (task_losses->size() != predictions.size()) {
            throw std::invalid_argument("task_losses length must equal teacher count");
        }
        for (double l : *task_losses) {
            if (!std::isfinite(l) || l < 0.0) {
                throw std::invalid_argument("task losses must be finite and nonnegative");
            }
        }
    }
}

EnsembleWeights::EnsembleWeights(std::vector<double> w) : weights(std::move(w)) {
    double sum = 0.0;
    for (double x : weights) {
        if (!std::isfinite(x) || x < 0.0) {
            throw std::invalid_argument("ensemble weights must be finite and nonnegative");
        }
        sum += x;
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("ensemble weights must sum to 1");
    }
}

std::string to_string(WeightMode m) {
    return m == WeightMode::InverseLoss ? "inverse_loss" : "literal_eq1";
}

WeightMode weight_mode_from_string(const std::string& s) {
    if (s == "inverse_loss") return WeightMode::InverseLoss;
    if (s == "literal_eq1") return WeightMode::LiteralProportional;
    throw std::invalid_argument("unknown weight mode '" + s +
                                "' (expected inverse_loss or literal_eq1)");
}

std::vector<double> teacher_task_losses(const std::vector<ProbVector>& preds, int label,
                                        double eps_log) {
    if (preds.empty()) throw std::invalid_argument("no teacher predictions");
    if (label < 0 || static_cast<std::size_t>(label) >= preds.front().size()) {
        throw std::invalid_argument("label out of range");
    }
    std::vector<double> losses;
    losses.reserve(preds.size());
    for (const auto& p : preds) {
        losses.push_back(-std::log(std::max(p[static_cast<std::size_t>(label)], eps_log)));
    }
    return losses;
}

EnsembleWeights correctness_weights(const std::vector<double>& losses, WeightMode mode,
                                    double eps_w) {
    if (losses.size() < 2) throw std::invalid_argument("need N >= 2 losses");
    for (double l : losses) {
        if (!std::isfinite(l) || l < 0.0) {
            throw std::invalid_argument("losses must be finite and nonnegative");
        }
    }
    const std::size_t n = losses.size();
    std::vector<double> w(n);
    if (mode == WeightMode::InverseLoss) {
        double denom = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = 1.0 / (losses[i] + eps_w);
            denom += w[i];
        }
        for (double& x : w) x /= denom;
    } else {
        double denom = 0.0;
        for (double l : losses) denom += l;
        if (denom == 0.0) {
            // All teachers perfect: symmetric limit.
            for (double& x : w) x = 1.0 / static_cast<double>(n);
        } else {
            for (std::size_t i = 0; i < n; ++i) w[i] = losses[i] / denom;
        }
    }
    return EnsembleWeights(std::move(w));
}

ProbVector weighted_ensemble(const TeacherPredictionSet& preds, const EnsembleWeights& weights) {
    if (weights.weights.size() != preds.num_teachers()) {
        throw std::invalid_argument("weight count does not match teacher count");
    }
    const std::size_t c = preds.num_classes();
    std::vector<double> out(c, 0.0);
    for (std::size_t i = 0; i < preds.num_teachers(); ++i) {
        const double wi = weights.weights[i];
        for (std::size_t k = 0; k < c; ++k) out[k] += wi * preds.predictions[i][k];
    }
    // Guard the [0,1] invariant against round-off in the convex combination.
    for (double& x : out) x = std::min(std::max(x, 0.0), 1.0);
    return ProbVector(std::move(out));
}

ProbVector uniform_ensemble(const TeacherPredictionSet& preds) {
    const std::size_t n = preds.num_teachers();
    const std::size_t c = preds.num_classes();
    std::vector<double> out(c, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < c; ++k) out[k] += preds.predictions[i][k];
    }
    for (double& x : out) x /= static_cast<double>(n);
    return ProbVector(std::move(out));
}

double disagreement(const TeacherPredictionSet& preds, double eps_log) {
    const std::size_t n = preds.num_teachers();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            sum += kl_divergence(preds.predictions[i], preds.predictions[j], eps_log);
        }
    }
    return sum / (static_cast<double>(n) * static_cast<double>(n - 1));
}

}  // namespace enskd
