// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0

#include "enskd/distill.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace enskd {

std::string to_string(CombinePolicy p) {
    return p == CombinePolicy::Sum ? "sum" : "interleave";
}

CombinePolicy combine_policy_from_string(const std::string& s) {
    if (s == "sum") return CombinePolicy::Sum;
    if (s == "interleave") return CombinePolicy::Interleave;
    throw std::invalid_argument("unknown combine policy '" + s + "' (expected sum or interleave)");
}

std::string to_json_line(const LossBreakdown& b) {
    nlohmann::json j;
    if (b.teacher_losses) j["teacher_losses"] = *b.teacher_losses;
    if (b.student_task_loss) j["student_task_loss"] = *b.student_task_loss;
    j["distill_loss"] = b.distill_loss;
    if (b.disagreement) j["disagreement"] = *b.disagreement;
    if (b.labeled_weight) j["labeled_weight"] = *b.labeled_weight;
    j["total"] = b.total;
    return j.dump();
}

double distill_loss(const ProbVector& teacher_ensemble, const ProbVector& student_pred,
                    double eps_log) {
    return cross_entropy(teacher_ensemble, student_pred, eps_log);
}

LabeledSampleContext make_labeled_context(const TeacherPredictionSet& preds,
                                          const DistillConfig& cfg) {
    if (!preds.task_losses) {
        throw std::invalid_argument("labels required: teacher task losses are missing");
    }
    LabeledSampleContext ctx;
    ctx.teacher_losses = *preds.task_losses;
    if (cfg.enable_teacher_weighting) {
        const EnsembleWeights w = correctness_weights(ctx.teacher_losses, cfg.weight_mode, cfg.eps_w);
        ctx.target = weighted_ensemble(preds, w);
    } else {
        ctx.target = uniform_ensemble(preds);
    }
    if (cfg.enable_labeled_loss_weighting) {
        double mean_loss = 0.0;
        for (double l : ctx.teacher_losses) mean_loss += l;
        mean_loss /= static_cast<double>(ctx.teacher_losses.size());
        ctx.labeled_weight = 1.0 / (1.0 + mean_loss);
    } else {
        ctx.labeled_weight = 1.0;
    }
    return ctx;
}

UnlabeledSampleContext make_unlabeled_context(const TeacherPredictionSet& preds,
                                              const DistillConfig& cfg) {
    UnlabeledSampleContext ctx;
    ctx.target = uniform_ensemble(preds);
    ctx.disagreement = disagreement(preds, cfg.eps_log);
    return ctx;
}

namespace {

double student_task_loss(const ProbVector& student_pred, int label, double eps_log) {
    if (label < 0 || static_cast<std::size_t>(label) >= student_pred.size()) {
        throw std::invalid_argument("label out of range");
    }
    return -std::log(std::max(student_pred[static_cast<std::size_t>(label)], eps_log));
}

double unlabeled_weight(double disagreement_score, const DistillConfig& cfg) {
    if (!cfg.enable_disagreement_weighting) return 1.0;
    return 1.0 + cfg.lambda * disagreement_score;
}

}  // namespace

LossBreakdown labeled_loss_from_context(const LabeledSampleContext& ctx,
                                        const ProbVector& student_pred, int label,
                                        const DistillConfig& cfg) {
    LossBreakdown b;
    b.teacher_losses = ctx.teacher_losses;
    b.labeled_weight = ctx.labeled_weight;
    b.distill_loss = distill_loss(ctx.target, student_pred, cfg.eps_log);
    b.student_task_loss = student_task_loss(student_pred, label, cfg.eps_log);
    b.total = ctx.labeled_weight * b.distill_loss + *b.student_task_loss;
    return b;
}

LossBreakdown unlabeled_loss_from_context(const UnlabeledSampleContext& ctx,
                                          const ProbVector& student_pred,
                                          const DistillConfig& cfg) {
    LossBreakdown b;
    b.disagreement = ctx.disagreement;
    b.distill_loss = distill_loss(ctx.target, student_pred, cfg.eps_log);
    b.total = unlabeled_weight(ctx.disagreement, cfg) * b.distill_loss;
    return b;
}

LossBreakdown labeled_sample_loss(const TeacherPredictionSet& preds, const ProbVector& student_pred,
                                  int label, const DistillConfig& cfg) {
    return labeled_loss_from_context(make_labeled_context(preds, cfg), student_pred, label, cfg);
}

LossBreakdown unlabeled_sample_loss(const TeacherPredictionSet& preds,
                                    const ProbVector& student_pred, const DistillConfig& cfg) {
    return unlabeled_loss_from_context(make_unlabeled_context(preds, cfg), student_pred, cfg);
}

std::vector<double> labeled_logit_gradient(const LabeledSampleContext& ctx,
                                           const ProbVector& student_pred, int label) {
    if (label < 0 || static_cast<std::size_t>(label) >= student_pred.size()) {
        throw std::invalid_argument("label out of range");
    }
    std::vector<double> g(student_pred.size());
    for (std::size_t i = 0; i < student_pred.size(); ++i) {
        const double onehot = static_cast<std::size_t>(label) == i ? 1.0 : 0.0;
        g[i] = ctx.labeled_weight * (student_pred[i] - ctx.target[i]) + (student_pred[i] - onehot);
    }
    return g;
}

std::vector<double> unlabeled_logit_gradient(const UnlabeledSampleContext& ctx,
                                             const ProbVector& student_pred,
                                             const DistillConfig& cfg) {
    const double w = unlabeled_weight(ctx.disagreement, cfg);
    std::vector<double> g(student_pred.size());
    for (std::size_t i = 0; i < student_pred.size(); ++i) {
        g[i] = w * (student_pred[i] - ctx.target[i]);
    }
    return g;
}

std::vector<double> student_logit_gradient(const TeacherPredictionSet& preds,
                                           const ProbVector& student_pred, int label,
                                           const DistillConfig& cfg) {
    return labeled_logit_gradient(make_labeled_context(preds, cfg), student_pred, label);
}

std::vector<double> student_logit_gradient(const TeacherPredictionSet& preds,
                                           const ProbVector& student_pred,
                                           const DistillConfig& cfg) {
    return unlabeled_logit_gradient(make_unlabeled_context(preds, cfg), student_pred, cfg);
}

double combined_batch_loss(std::span<const LossBreakdown> labeled,
                           std::span<const LossBreakdown> unlabeled, const DistillConfig&) {
    if (labeled.empty() && unlabeled.empty()) {
        throw std::invalid_argument("both batches empty");
    }
    double out = 0.0;
    if (!labeled.empty()) {
        double sum = 0.0;
        for (const auto& b : labeled) sum += b.total;
        out += sum / static_cast<double>(labeled.size());
    }
    if (!unlabeled.empty()) {
        double sum = 0.0;
        for (const auto& b : unlabeled) sum += b.total;
        out += sum / static_cast<double>(unlabeled.size());
    }
    return out;
}

}  // namespace enskd
