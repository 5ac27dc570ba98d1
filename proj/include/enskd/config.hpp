// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "enskd/distill.hpp"
#include "enskd/kernels.hpp"
#include "enskd/mlp.hpp"
#include "enskd/train.hpp"

namespace enskd {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::string message) : std::runtime_error(std::move(message)) {}
};

/// Full run configuration. Every field has a documented default (see
/// config_keys() and the README); unknown keys are rejected.
struct RunConfig {
    // synthetic data
    int num_classes = 3;
    int input_dim = 2;
    int rows_per_class = 1667;
    double mixture_radius = 1.8;
    double cov_scale = 1.0;
    double labeled_fraction = 0.4;
    double val_fraction = 0.0;
    double test_fraction = 0.2;
    bool teachers_use_unlabeled_rows = false;

    // architecture
    std::vector<int> hidden_dims = {32};
    std::string activation = "relu";

    // optimizer
    std::string optimizer = "adam";
    double learning_rate = 1e-3;
    int batch_size = 16;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;

    // teachers / student
    int n_teachers = 5;
    int teacher_epochs = 30;
    int student_epochs = 30;

    // distillation
    double lambda = 10.0;
    std::string weight_mode = "inverse_loss";
    bool enable_teacher_weighting = true;
    bool enable_labeled_loss_weighting = true;
    bool enable_disagreement_weighting = true;
    std::string combine_policy = "sum";
    double eps_log = 1e-12;
    double eps_w = 1e-8;

    // experiment
    int num_seeds = 5;
    std::uint64_t seed = 42;
    std::string out_dir = "runs";
    std::vector<double> lambda_grid = {0, 1, 5, 10, 15, 25, 50};
    bool log_breakdowns = false;
    bool parallel = true;
    int threads = 0;

    MlpArchitecture architecture() const;
    DistillConfig distill() const;
    OptimizerConfig optimizer_config() const;
    ExecMode exec_mode() const;

    /// Throws ConfigError when field values are out of range or inconsistent.
    void validate() const;
};

struct ConfigKeyInfo {
    std::string name;
    std::string help;
};

/// All accepted config keys with one-line help, in documentation order.
const std::vector<ConfigKeyInfo>& config_keys();

/// Sets one key from its string form, with type and range checking.
/// Throws ConfigError naming the key on unknown keys or bad values.
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

/// Loads key = value (with # comments) or JSON config, by extension
/// (.json -> JSON, anything else -> key = value).
RunConfig load_config(const std::filesystem::path& path);

/// Config snapshot for report provenance, as a JSON object string.
std::string config_to_json(const RunConfig& cfg);

/// Creates <out_dir>/run-<UTC stamp>-seed<seed>[-k], never reusing an
/// existing directory.
std::filesystem::path make_run_dir(const RunConfig& cfg);

}  // namespace enskd
