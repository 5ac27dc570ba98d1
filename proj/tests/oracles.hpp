// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0
//
// Independent straight-loop reference implementations used as test oracles.
// These deliberately avoid the library's types and code paths: plain loops
// over plain vectors, written from the objective definitions.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

inline std::vector<double> softmax(const std::vector<double>& z) {
    double m = z[0];
    for (double x : z) m = std::max(m, x);
    std::vector<double> e(z.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        e[i] = std::exp(z[i] - m);
        sum += e[i];
    }
    for (double& x : e) x /= sum;
    return e;
}

inline double cross_entropy(const std::vector<double>& target, const std::vector<double>& pred,
                            double eps_log = 1e-12) {
    double s = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        s -= target[i] * std::log(std::max(pred[i], eps_log));
    }
    return s;
}

inline double kl(const std::vector<double>& p, const std::vector<double>& q,
                 double eps_log = 1e-12) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi = std::max(p[i], eps_log);
        const double qi = std::max(q[i], eps_log);
        s += pi * std::log(pi / qi);
    }
    return std::max(s, 0.0);
}

inline std::vector<double> task_losses(const std::vector<std::vector<double>>& preds, int label,
                                       double eps_log = 1e-12) {
    std::vector<double> out;
    for (const auto& p : preds) {
        out.push_back(-std::log(std::max(p[static_cast<std::size_t>(label)], eps_log)));
    }
    return out;
}

inline std::vector<double> weights_inverse(const std::vector<double>& losses,
                                           double eps_w = 1e-8) {
    std::vector<double> w(losses.size());
    double denom = 0.0;
    for (std::size_t i = 0; i < losses.size(); ++i) {
        w[i] = 1.0 / (losses[i] + eps_w);
        denom += w[i];
    }
    for (double& x : w) x /= denom;
    return w;
}

inline std::vector<double> weights_literal(const std::vector<double>& losses) {
    double denom = 0.0;
    for (double l : losses) denom += l;
    std::vector<double> w(losses.size());
    if (denom == 0.0) {
        for (double& x : w) x = 1.0 / static_cast<double>(losses.size());
    } else {
        for (std::size_t i = 0; i < losses.size(); ++i) w[i] = losses[i] / denom;
    }
    return w;
}

inline std::vector<double> combine(const std::vector<std::vector<double>>& preds,
                                   const std::vector<double>& w) {
    std::vector<double> out(preds[0].size(), 0.0);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        for (std::size_t c = 0; c < out.size(); ++c) out[c] += w[i] * preds[i][c];
    }
    return out;
}

inline std::vector<double> uniform_average(const std::vector<std::vector<double>>& preds) {
    std::vector<double> out(preds[0].size(), 0.0);
    for (const auto& p : preds) {
        for (std::size_t c = 0; c < out.size(); ++c) out[c] += p[c];
    }
    for (double& x : out) x /= static_cast<double>(preds.size());
    return out;
}

inline double disagreement(const std::vector<std::vector<double>>& preds,
                           double eps_log = 1e-12) {
    const std::size_t n = preds.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) sum += kl(preds[i], preds[j], eps_log);
        }
    }
    return sum / (static_cast<double>(n) * static_cast<double>(n - 1));
}

struct LabeledRef {
    std::vector<double> losses;
    std::vector<double> weights;
    std::vector<double> ensemble;
    double distill = 0.0;
    double labeled_weight = 0.0;
    double task = 0.0;
    double total = 0.0;
};

inline LabeledRef labeled_objective(const std::vector<std::vector<double>>& preds, int label,
                                    const std::vector<double>& student, bool inverse_mode,
                                    bool teacher_weighting, bool loss_weighting,
                                    double eps_log = 1e-12, double eps_w = 1e-8) {
    LabeledRef r;
    r.losses = task_losses(preds, label, eps_log);
    r.weights = inverse_mode ? weights_inverse(r.losses, eps_w) : weights_literal(r.losses);
    r.ensemble = teacher_weighting ? combine(preds, r.weights) : uniform_average(preds);
    r.distill = cross_entropy(r.ensemble, student, eps_log);
    if (loss_weighting) {
        double mean = 0.0;
        for (double l : r.losses) mean += l;
        mean /= static_cast<double>(r.losses.size());
        r.labeled_weight = 1.0 / (1.0 + mean);
    } else {
        r.labeled_weight = 1.0;
    }
    r.task = -std::log(std::max(student[static_cast<std::size_t>(label)], eps_log));
    r.total = r.labeled_weight * r.distill + r.task;
    return r;
}

struct UnlabeledRef {
    std::vector<double> average;
    double distill = 0.0;
    double disagreement = 0.0;
    double total = 0.0;
};

inline UnlabeledRef unlabeled_objective(const std::vector<std::vector<double>>& preds,
                                        const std::vector<double>& student, double lambda,
                                        bool disagreement_weighting, double eps_log = 1e-12) {
    UnlabeledRef r;
    r.average = uniform_average(preds);
    r.distill = cross_entropy(r.average, student, eps_log);
    r.disagreement = disagreement(preds, eps_log);
    const double w = disagreement_weighting ? 1.0 + lambda * r.disagreement : 1.0;
    r.total = w * r.distill;
    return r;
}

/// Random probability vector: normalized uniforms, entries bounded away from 0.
inline std::vector<double> random_prob(std::mt19937_64& rng, std::size_t c) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> p(c);
    double sum = 0.0;
    for (double& x : p) {
        x = u(rng);
        sum += x;
    }
    for (double& x : p) x /= sum;
    return p;
}

inline double rel_err(double a, double b) {
    return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-8});
}

}  // namespace oracle
