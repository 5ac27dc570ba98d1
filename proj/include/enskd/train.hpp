// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "enskd/data.hpp"
#include "enskd/distill.hpp"
#include "enskd/kernels.hpp"
#include "enskd/mlp.hpp"
#include "enskd/optim.hpp"

namespace enskd {

struct OptimizerConfig {
    enum class Kind { Adam, Sgd };
    Kind kind = Kind::Adam;
    double learning_rate = 1e-3;
    std::size_t batch_size = 16;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

std::string to_string(OptimizerConfig::Kind k);
OptimizerConfig::Kind optimizer_kind_from_string(const std::string& s);

struct TrainResult {
    MlpParameters params;
    double final_train_loss = 0.0;  // mean loss over the last epoch
};

/// Trains a classifier on plain cross-entropy against the labels.
/// Deterministic given seed (initialization and batch shuffling).
TrainResult train_teacher(const MlpArchitecture& arch, const std::vector<LabeledExample>& train,
                          int epochs, const OptimizerConfig& opt, std::uint64_t seed,
                          ExecMode mode);

/// Trains a student against frozen teachers on a labeled pool, an unlabeled
/// pool, or both. Either pool may be empty (not both). Teacher predictions
/// and the per-sample weighting quantities are precomputed once.
///
/// When loss_log is non-null, every per-sample LossBreakdown is appended to
/// it as one JSON object per line.
TrainResult train_student(const MlpArchitecture& arch, const std::vector<MlpParameters>& teachers,
                          const std::vector<LabeledExample>& labeled,
                          const std::vector<UnlabeledExample>& unlabeled,
                          const DistillConfig& cfg, int epochs, const OptimizerConfig& opt,
                          std::uint64_t seed, ExecMode mode, std::ostream* loss_log = nullptr);

/// Argmax accuracy of the uniform soft-label average of the teachers.
double ensemble_accuracy(const std::vector<MlpParameters>& teachers, Activation activation,
                         const std::vector<LabeledExample>& test, ExecMode mode);

}  // namespace enskd
