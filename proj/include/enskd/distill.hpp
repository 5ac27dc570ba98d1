// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "enskd/ensemble.hpp"
#include "enskd/numerics.hpp"

namespace enskd {

/// How labeled and unlabeled pools are combined during student training.
/// Sum: one optimizer step per paired batch on the summed means.
/// Interleave: alternating optimizer steps on labeled and unlabeled batches.
enum class CombinePolicy { Sum, Interleave };

std::string to_string(CombinePolicy p);
CombinePolicy combine_policy_from_string(const std::string& s);

struct DistillConfig {
    double lambda = 10.0;
    WeightMode weight_mode = WeightMode::InverseLoss;
    bool enable_teacher_weighting = true;        // per-teacher correctness weights (labeled)
    bool enable_labeled_loss_weighting = true;   // 1/(1+mean teacher loss) factor (labeled)
    bool enable_disagreement_weighting = true;   // (1 + lambda*L^p) factor (unlabeled)
    CombinePolicy combine_policy = CombinePolicy::Sum;
    double eps_log = kEpsLog;
    double eps_w = kEpsWeight;
};

/// Per-sample loss record. Optional fields are present when the governing
/// objective defines them (teacher losses and the task loss only exist on
/// labeled samples; disagreement only on unlabeled ones).
struct LossBreakdown {
    std::optional<std::vector<double>> teacher_losses;  // L^t_i
    std::optional<double> student_task_loss;            // L^s
    double distill_loss = 0.0;                          // L^d
    std::optional<double> disagreement;                 // L^p
    std::optional<double> labeled_weight;               // 1/(1 + mean teacher loss)
    double total = 0.0;                                 // L
};

/// One line of the JSONL loss log.
std::string to_json_line(const LossBreakdown& b);

/// L^d: cross-entropy of the teacher-ensemble soft label against the student's.
double distill_loss(const ProbVector& teacher_ensemble, const ProbVector& student_pred,
                    double eps_log = kEpsLog);

/// Precomputed per-sample quantities that depend only on the (frozen)
/// teachers, not on the student. Building these once per sample makes the
/// training loop cheap without forking the loss code path.
struct LabeledSampleContext {
    std::vector<double> teacher_losses;
    ProbVector target;       // correctness-weighted or uniform ensemble, per config
    double labeled_weight;   // 1 when the loss-weighting flag is off
};

struct UnlabeledSampleContext {
    ProbVector target;       // uniform average of teacher predictions
    double disagreement;     // L^p
};

/// Requires task_losses to be present; throws "labels required" otherwise.
LabeledSampleContext make_labeled_context(const TeacherPredictionSet& preds,
                                          const DistillConfig& cfg);

UnlabeledSampleContext make_unlabeled_context(const TeacherPredictionSet& preds,
                                              const DistillConfig& cfg);

LossBreakdown labeled_loss_from_context(const LabeledSampleContext& ctx,
                                        const ProbVector& student_pred, int label,
                                        const DistillConfig& cfg);

LossBreakdown unlabeled_loss_from_context(const UnlabeledSampleContext& ctx,
                                          const ProbVector& student_pred,
                                          const DistillConfig& cfg);

/// Labeled objective: total = labeled_weight * L^d + L^s.
LossBreakdown labeled_sample_loss(const TeacherPredictionSet& preds, const ProbVector& student_pred,
                                  int label, const DistillConfig& cfg);

/// Unlabeled objective: total = (1 + lambda * L^p) * L^d.
LossBreakdown unlabeled_sample_loss(const TeacherPredictionSet& preds,
                                    const ProbVector& student_pred, const DistillConfig& cfg);

/// Gradient of the labeled objective w.r.t. student logits:
///   labeled_weight * (s - target) + (s - onehot(label)).
/// Teachers and the per-sample weights are constants.
std::vector<double> labeled_logit_gradient(const LabeledSampleContext& ctx,
                                           const ProbVector& student_pred, int label);

/// Gradient of the unlabeled objective w.r.t. student logits:
///   (1 + lambda * L^p) * (s - target).
std::vector<double> unlabeled_logit_gradient(const UnlabeledSampleContext& ctx,
                                             const ProbVector& student_pred,
                                             const DistillConfig& cfg);

/// Gradient of the labeled objective, from raw predictions.
std::vector<double> student_logit_gradient(const TeacherPredictionSet& preds,
                                           const ProbVector& student_pred, int label,
                                           const DistillConfig& cfg);

/// Gradient of the unlabeled objective, from raw predictions.
std::vector<double> student_logit_gradient(const TeacherPredictionSet& preds,
                                           const ProbVector& student_pred,
                                           const DistillConfig& cfg);

/// Mean labeled total plus mean unlabeled total; an empty side contributes
/// nothing. Throws when both batches are empty. The value is the same under
/// both combine policies (they differ only in optimizer stepping).
double combined_batch_loss(std::span<const LossBreakdown> labeled,
                           std::span<const LossBreakdown> unlabeled, const DistillConfig& cfg);

}  // namespace enskd
