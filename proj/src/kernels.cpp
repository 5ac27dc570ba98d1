// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0

#include "enskd/kernels.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <stdexcept>

namespace enskd {

namespace {

// Exceptions must not escape an OpenMP parallel region; the first one is
// captured and rethrown after the loop.
class ExceptionCollector {
public:
    template <typename Fn>
    void run(Fn&& fn) noexcept {
        try {
            fn();
        } catch (...) {
            const std::lock_guard<std::mutex> lock(mutex_);
            if (!eptr_) eptr_ = std::current_exception();
        }
    }

    void rethrow_if_any() const {
        if (eptr_) std::rethrow_exception(eptr_);
    }

private:
    std::mutex mutex_;
    std::exception_ptr eptr_;
};

SampleLoss eval_sample(const MlpParameters& params, Activation activation,
                       const std::vector<double>& x, std::size_t source_index,
                       const SampleLossFn& loss_fn, GradientSet& grad_out) {
    ForwardCache cache;
    const LogitVector logits = forward_cached(params, x, cache, activation);
    const ProbVector pred = softmax(logits);
    SampleLoss loss = loss_fn(source_index, pred);
    grad_out = backward(params, cache, loss.logit_grad, activation);
    return loss;
}

BatchGradResult batch_gradient_serial(const MlpParameters& params, Activation activation,
                                      const std::vector<std::vector<double>>& features,
                                      std::span<const std::size_t> batch,
                                      const SampleLossFn& loss_fn) {
    BatchGradResult result;
    result.mean_grad = zero_gradients(params);
    result.breakdowns.resize(batch.size());
    double sum_total = 0.0;
    GradientSet g;
    for (std::size_t k = 0; k < batch.size(); ++k) {
        const std::size_t idx = batch[k];
        SampleLoss loss = eval_sample(params, activation, features[idx], idx, loss_fn, g);
        accumulate(result.mean_grad, g);
        sum_total += loss.breakdown.total;
        result.breakdowns[k] = std::move(loss.breakdown);
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    scale(result.mean_grad, inv);
    result.mean_total = sum_total * inv;
    return result;
}

BatchGradResult batch_gradient_omp(const MlpParameters& params, Activation activation,
                                   const std::vector<std::vector<double>>& features,
                                   std::span<const std::size_t> batch,
                                   const SampleLossFn& loss_fn) {
    const std::size_t n = batch.size();
    std::vector<GradientSet> grads(n);
    std::vector<LossBreakdown> breakdowns(n);

    // Per-sample work runs in parallel; each slot is written by exactly one
    // iteration. The reduction below runs serially in sample order, so the
    // result is bit-identical to the serial reference for any thread count.
    ExceptionCollector errors;
    #pragma omp parallel for schedule(static)
    for (long k = 0; k < static_cast<long>(n); ++k) {
        errors.run([&, k] {
            const std::size_t idx = batch[static_cast<std::size_t>(k)];
            SampleLoss loss = eval_sample(params, activation, features[idx], idx, loss_fn,
                                          grads[static_cast<std::size_t>(k)]);
            breakdowns[static_cast<std::size_t>(k)] = std::move(loss.breakdown);
        });
    }
    errors.rethrow_if_any();

    BatchGradResult result;
    result.mean_grad = zero_gradients(params);
    double sum_total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        accumulate(result.mean_grad, grads[k]);
        sum_total += breakdowns[k].total;
    }
    const double inv = 1.0 / static_cast<double>(n);
    scale(result.mean_grad, inv);
    result.mean_total = sum_total * inv;
    result.breakdowns = std::move(breakdowns);
    return result;
}

}  // namespace

BatchGradResult batch_gradient(const MlpParameters& params, Activation activation,
                               const std::vector<std::vector<double>>& features,
                               std::span<const std::size_t> batch, const SampleLossFn& loss_fn,
                               ExecMode mode) {
    if (batch.empty()) throw std::invalid_argument("empty batch");
    if (mode == ExecMode::Serial) {
        return batch_gradient_serial(params, activation, features, batch, loss_fn);
    }
    return batch_gradient_omp(params, activation, features, batch, loss_fn);
}

std::vector<ProbVector> predict_probs(const MlpParameters& params, Activation activation,
                                      const std::vector<std::vector<double>>& features,
                                      ExecMode mode) {
    std::vector<ProbVector> out(features.size());
    if (mode == ExecMode::Serial) {
        for (std::size_t i = 0; i < features.size(); ++i) {
            ForwardCache cache;
            out[i] = softmax(forward_cached(params, features[i], cache, activation));
        }
        return out;
    }
    ExceptionCollector errors;
    #pragma omp parallel for schedule(static)
    for (long i = 0; i < static_cast<long>(features.size()); ++i) {
        errors.run([&, i] {
            ForwardCache cache;
            out[static_cast<std::size_t>(i)] = softmax(
                forward_cached(params, features[static_cast<std::size_t>(i)], cache, activation));
        });
    }
    errors.rethrow_if_any();
    return out;
}

std::size_t argmax(const ProbVector& p) {
    const auto& v = p.values();
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

std::size_t count_correct(const MlpParameters& params, Activation activation,
                          const std::vector<LabeledExample>& examples, ExecMode mode) {
    long correct = 0;
    if (mode == ExecMode::Serial) {
        for (const auto& ex : examples) {
            ForwardCache cache;
            const ProbVector p = softmax(forward_cached(params, ex.features, cache, activation));
            if (argmax(p) == static_cast<std::size_t>(ex.label)) ++correct;
        }
        return static_cast<std::size_t>(correct);
    }
    ExceptionCollector errors;
    #pragma omp parallel for schedule(static) reduction(+ : correct)
    for (long i = 0; i < static_cast<long>(examples.size()); ++i) {
        errors.run([&, i, &correct] {
            const auto& ex = examples[static_cast<std::size_t>(i)];
            ForwardCache cache;
            const ProbVector p = softmax(forward_cached(params, ex.features, cache, activation));
            if (argmax(p) == static_cast<std::size_t>(ex.label)) ++correct;
        });
    }
    errors.rethrow_if_any();
    return static_cast<std::size_t>(correct);
}

double evaluate_accuracy(const MlpParameters& params, Activation activation,
                         const std::vector<LabeledExample>& examples, ExecMode mode) {
    if (examples.empty()) throw std::invalid_argument("empty evaluation set");
    return static_cast<double>(count_correct(params, activation, examples, mode)) /
           static_cast<double>(examples.size());
}

}  // namespace enskd
