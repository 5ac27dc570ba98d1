// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

namespace enskd {

/// Probabilities are clamped to [kEpsLog, 1] before any logarithm, so that
/// one-hot and saturated predictions stay finite.
inline constexpr double kEpsLog = 1e-12;

/// Unnormalized class scores, as produced by a model's output layer.
struct LogitVector {
    std::vector<double> values;

    LogitVector() = default;
    explicit LogitVector(std::vector<double> v) : values(std::move(v)) {}

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

/// A probability distribution over C >= 2 classes (a soft label).
/// Construction validates the invariants: every element in [0, 1],
/// elements summing to 1 within 1e-9.
class ProbVector {
public:
    ProbVector() = default;
    explicit ProbVector(std::vector<double> v);

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    bool operator==(const ProbVector& other) const { return values_ == other.values_; }

private:
    std::vector<double> values_;
};

/// Numerically safe softmax (max-subtracted). Throws "invalid logits" on
/// non-finite input. The argmax of the input is preserved.
ProbVector softmax(const LogitVector& z);

/// -sum_i target[i] * log(pred[i]), with pred clamped to >= eps_log.
/// Throws "class-count mismatch" when the lengths differ.
double cross_entropy(const ProbVector& target, const ProbVector& pred,
                     double eps_log = kEpsLog);

/// KL(p || q) = sum_i p[i] * log(p[i] / q[i]), both arguments clamped to
/// >= eps_log. The result is clamped to >= 0 to absorb round-off from the
/// clamping of near-zero entries.
double kl_divergence(const ProbVector& p, const ProbVector& q,
                     double eps_log = kEpsLog);

}  // namespace enskd
