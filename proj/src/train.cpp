// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0

#include "enskd/train.hpp"

#include <cmath>
#include <stdexcept>

namespace enskd {

std::string to_string(OptimizerConfig::Kind k) {
    return k == OptimizerConfig::Kind::Adam ? "adam" : "sgd";
}

OptimizerConfig::Kind optimizer_kind_from_string(const std::string& s) {
    if (s == "adam") return OptimizerConfig::Kind::Adam;
    if (s == "sgd") return OptimizerConfig::Kind::Sgd;
    throw std::invalid_argument("unknown optimizer '" + s + "' (expected adam or sgd)");
}

namespace {

// Shuffle-stream offset for the unlabeled pool, so the two pools draw
// independent batch orders from one training seed.
constexpr std::uint64_t kUnlabeledStreamOffset = 7919;

class Stepper {
public:
    Stepper(MlpParameters& params, const OptimizerConfig& opt)
        : params_(params), opt_(opt) {
        if (opt.kind == OptimizerConfig::Kind::Adam) {
            state_ = AdamState::init(params, opt.beta1, opt.beta2, opt.epsilon);
        }
    }

    void step(const GradientSet& grads) {
        if (opt_.kind == OptimizerConfig::Kind::Adam) {
            adam_step(params_, grads, state_, opt_.learning_rate);
        } else {
            sgd_step(params_, grads, opt_.learning_rate);
        }
    }

private:
    MlpParameters& params_;
    const OptimizerConfig& opt_;
    AdamState state_;
};

std::vector<std::vector<double>> feature_matrix(const std::vector<LabeledExample>& rows) {
    std::vector<std::vector<double>> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.features);
    return out;
}

std::vector<std::vector<double>> feature_matrix(const std::vector<UnlabeledExample>& rows) {
    std::vector<std::vector<double>> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.features);
    return out;
}

void log_breakdowns(std::ostream* log, const char* pool, int epoch,
                    std::span<const std::size_t> batch,
                    const std::vector<LossBreakdown>& breakdowns) {
    if (!log) return;
    for (std::size_t k = 0; k < batch.size(); ++k) {
        *log << "{\"epoch\":" << epoch << ",\"pool\":\"" << pool << "\",\"index\":" << batch[k]
             << ",\"loss\":" << to_json_line(breakdowns[k]) << "}\n";
    }
}

}  // namespace

TrainResult train_teacher(const MlpArchitecture& arch, const std::vector<LabeledExample>& train,
                          int epochs, const OptimizerConfig& opt, std::uint64_t seed,
                          ExecMode mode) {
    if (train.empty()) throw std::invalid_argument("empty training set");
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");

    const auto features = feature_matrix(train);
    MlpParameters params = init_parameters(arch, seed);
    Stepper stepper(params, opt);

    SampleLossFn loss_fn = [&](std::size_t idx, const ProbVector& pred) {
        const int label = train[idx].label;
        SampleLoss s;
        s.breakdown.student_task_loss =
            -std::log(std::max(pred[static_cast<std::size_t>(label)], kEpsLog));
        s.breakdown.total = *s.breakdown.student_task_loss;
        s.logit_grad.resize(pred.size());
        for (std::size_t i = 0; i < pred.size(); ++i) {
            s.logit_grad[i] = pred[i] - (static_cast<std::size_t>(label) == i ? 1.0 : 0.0);
        }
        return s;
    };

    double epoch_loss = 0.0;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        const auto epoch_batches =
            batches(train.size(), opt.batch_size, seed, static_cast<std::uint64_t>(epoch));
        double sum = 0.0;
        for (const auto& batch : epoch_batches) {
            const BatchGradResult r =
                batch_gradient(params, arch.activation, features, batch, loss_fn, mode);
            stepper.step(r.mean_grad);
            sum += r.mean_total;
        }
        epoch_loss = sum / static_cast<double>(epoch_batches.size());
    }
    return {std::move(params), epoch_loss};
}

TrainResult train_student(const MlpArchitecture& arch, const std::vector<MlpParameters>& teachers,
                          const std::vector<LabeledExample>& labeled,
                          const std::vector<UnlabeledExample>& unlabeled,
                          const DistillConfig& cfg, int epochs, const OptimizerConfig& opt,
                          std::uint64_t seed, ExecMode mode, std::ostream* loss_log) {
    if (teachers.size() < 2) throw std::invalid_argument("need N >= 2 teachers");
    if (labeled.empty() && unlabeled.empty()) {
        throw std::invalid_argument("both training pools empty");
    }
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");

    const auto labeled_features = feature_matrix(labeled);
    const auto unlabeled_features = feature_matrix(unlabeled);

    // Teachers are frozen: their predictions and every student-independent
    // weighting quantity are computed once per sample up front.
    std::vector<std::vector<ProbVector>> teacher_probs_labeled(teachers.size());
    std::vector<std::vector<ProbVector>> teacher_probs_unlabeled(teachers.size());
    for (std::size_t t = 0; t < teachers.size(); ++t) {
        if (!labeled.empty()) {
            teacher_probs_labeled[t] =
                predict_probs(teachers[t], arch.activation, labeled_features, mode);
        }
        if (!unlabeled.empty()) {
            teacher_probs_unlabeled[t] =
                predict_probs(teachers[t], arch.activation, unlabeled_features, mode);
        }
    }

    std::vector<LabeledSampleContext> labeled_ctx(labeled.size());
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        std::vector<ProbVector> preds(teachers.size());
        for (std::size_t t = 0; t < teachers.size(); ++t) preds[t] = teacher_probs_labeled[t][i];
        auto losses = teacher_task_losses(preds, labeled[i].label, cfg.eps_log);
        const TeacherPredictionSet set(std::move(preds), std::move(losses));
        labeled_ctx[i] = make_labeled_context(set, cfg);
    }

    std::vector<UnlabeledSampleContext> unlabeled_ctx(unlabeled.size());
    for (std::size_t i = 0; i < unlabeled.size(); ++i) {
        std::vector<ProbVector> preds(teachers.size());
        for (std::size_t t = 0; t < teachers.size(); ++t) preds[t] = teacher_probs_unlabeled[t][i];
        const TeacherPredictionSet set(std::move(preds));
        unlabeled_ctx[i] = make_unlabeled_context(set, cfg);
    }

    SampleLossFn labeled_fn = [&](std::size_t idx, const ProbVector& pred) {
        SampleLoss s;
        s.breakdown = labeled_loss_from_context(labeled_ctx[idx], pred, labeled[idx].label, cfg);
        s.logit_grad = labeled_logit_gradient(labeled_ctx[idx], pred, labeled[idx].label);
        return s;
    };
    SampleLossFn unlabeled_fn = [&](std::size_t idx, const ProbVector& pred) {
        SampleLoss s;
        s.breakdown = unlabeled_loss_from_context(unlabeled_ctx[idx], pred, cfg);
        s.logit_grad = unlabeled_logit_gradient(unlabeled_ctx[idx], pred, cfg);
        return s;
    };

    MlpParameters params = init_parameters(arch, seed);
    Stepper stepper(params, opt);

    double epoch_loss = 0.0;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        const auto e = static_cast<std::uint64_t>(epoch);
        const auto labeled_batches =
            labeled.empty() ? std::vector<std::vector<std::size_t>>{}
                            : batches(labeled.size(), opt.batch_size, seed, e);
        const auto unlabeled_batches =
            unlabeled.empty()
                ? std::vector<std::vector<std::size_t>>{}
                : batches(unlabeled.size(), opt.batch_size, seed + kUnlabeledStreamOffset, e);

        const std::size_t steps = std::max(labeled_batches.size(), unlabeled_batches.size());
        double sum = 0.0;
        for (std::size_t k = 0; k < steps; ++k) {
            const bool has_l = k < labeled_batches.size();
            const bool has_u = k < unlabeled_batches.size();
            BatchGradResult rl, ru;
            if (has_l) {
                rl = batch_gradient(params, arch.activation, labeled_features, labeled_batches[k],
                                    labeled_fn, mode);
                log_breakdowns(loss_log, "labeled", epoch, labeled_batches[k], rl.breakdowns);
            }
            if (cfg.combine_policy == CombinePolicy::Interleave && has_l) {
                stepper.step(rl.mean_grad);
            }
            if (has_u) {
                ru = batch_gradient(params, arch.activation, unlabeled_features,
                                    unlabeled_batches[k], unlabeled_fn, mode);
                log_breakdowns(loss_log, "unlabeled", epoch, unlabeled_batches[k], ru.breakdowns);
            }
            if (cfg.combine_policy == CombinePolicy::Interleave) {
                if (has_u) stepper.step(ru.mean_grad);
            } else {
                GradientSet grads = zero_gradients(params);
                if (has_l) accumulate(grads, rl.mean_grad);
                if (has_u) accumulate(grads, ru.mean_grad);
                stepper.step(grads);
            }
            sum += (has_l ? rl.mean_total : 0.0) + (has_u ? ru.mean_total : 0.0);
        }
        epoch_loss = sum / static_cast<double>(steps);
    }
    return {std::move(params), epoch_loss};
}

double ensemble_accuracy(const std::vector<MlpParameters>& teachers, Activation activation,
                         const std::vector<LabeledExample>& test, ExecMode mode) {
    if (teachers.size() < 2) throw std::invalid_argument("need N >= 2 teachers");
    if (test.empty()) throw std::invalid_argument("empty evaluation set");
    const auto features = feature_matrix(test);
    std::vector<std::vector<ProbVector>> probs(teachers.size());
    for (std::size_t t = 0; t < teachers.size(); ++t) {
        probs[t] = predict_probs(teachers[t], activation, features, mode);
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        std::vector<ProbVector> preds(teachers.size());
        for (std::size_t t = 0; t < teachers.size(); ++t) preds[t] = probs[t][i];
        const TeacherPredictionSet set(std::move(preds));
        if (argmax(uniform_ensemble(set)) == static_cast<std::size_t>(test[i].label)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace enskd
