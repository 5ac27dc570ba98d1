// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0

#include "enskd/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace enskd {

ProbVector::ProbVector(std::vector<double> v) : values_(std::move(v)) {
    if (values_.size() < 2) {
        throw std::invalid_argument("ProbVector requires at least 2 classes");
    }
    double sum = 0.0;
    for (double x : values_) {
        if (!(x >= 0.0 && x <= 1.0)) {
            throw std::invalid_argument("ProbVector element outside [0, 1]");
        }
        sum += x;
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("ProbVector does not sum to 1");
    }
}

ProbVector softmax(const LogitVector& z) {
    if (z.size() < 2) {
        throw std::invalid_argument("invalid logits: need at least 2 classes");
    }
    for (double x : z.values) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument("invalid logits");
        }
    }
    const double m = *std::max_element(z.values.begin(), z.values.end());
    std::vector<double> e(z.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        e[i] = std::exp(z[i] - m);
        sum += e[i];
    }
    for (double& x : e) x /= sum;
    return ProbVector(std::move(e));
}

namespace {

inline double clamp_prob(double p, double eps_log) {
    return std::max(p, eps_log);
}

}  // namespace

double cross_entropy(const ProbVector& target, const ProbVector& pred, double eps_log) {
    if (target.size() != pred.size()) {
        throw std::invalid_argument("class-count mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        sum -= target[i] * std::log(clamp_prob(pred[i], eps_log));
    }
    return sum;
}

double kl_divergence(const ProbVector& p, const ProbVector& q, double eps_log) {
    if (p.size() != q.size()) {
        throw std::invalid_argument("class-count mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi = clamp_prob(p[i], eps_log);
        const double qi = clamp_prob(q[i], eps_log);
        sum += pi * std::log(pi / qi);
    }
    return std::max(sum, 0.0);
}

}  // namespace enskd
