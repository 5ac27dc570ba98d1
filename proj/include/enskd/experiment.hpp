// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "enskd/config.hpp"
#include "enskd/data.hpp"
#include "enskd/mlp.hpp"

namespace enskd {

/// The five compared methods. `single` is the mean over individual teachers;
/// `ensemble` is uniform soft-label averaging at inference time; the three KD
/// methods train a fresh student.
enum class MethodId { Single, Ensemble, KdLabeled, KdUnlabeled, UniKd };

std::string to_string(MethodId m);
MethodId method_from_string(const std::string& s);

/// Seed derivation from the master seed (all offsets documented here):
///   data generation        master + 500
///   teacher i              master + 1000 * (i + 1)
///   repetition r           master + r      (the report's seed column)
///   student of repetition  master + 2000 + r
struct SeedScheme {
    std::uint64_t master = 42;

    std::uint64_t data() const { return master + 500; }
    std::uint64_t teacher(std::size_t i) const { return master + 1000 * (i + 1); }
    std::uint64_t repetition(std::size_t r) const { return master + r; }
    std::uint64_t student(std::size_t r) const { return master + 2000 + r; }
};

/// Dataset plus the rows teachers train on (the labeled partition, or with
/// teachers_use_unlabeled_rows also the unlabeled rows with their original
/// labels restored).
struct DatasetBundle {
    SplitDataset split;
    std::vector<LabeledExample> teacher_train;
};

/// Synthetic dataset per the config: balanced Gaussian mixture with class
/// means on a circle, split into the four partitions.
DatasetBundle build_dataset(const RunConfig& cfg);

/// Dataset loaded from CSVs written by gen-data (labeled_train.csv,
/// unlabeled_train.csv, test.csv, optional validation.csv).
DatasetBundle load_dataset(const std::filesystem::path& dir, const RunConfig& cfg);

struct TeacherSet {
    std::vector<MlpParameters> params;
    std::vector<double> test_accuracy;
    std::vector<double> final_train_loss;
};

/// Trains the N teachers on their derived seeds. Divergence raises an error
/// naming the teacher.
TeacherSet train_teachers(const DatasetBundle& data, const RunConfig& cfg);

/// Test accuracy of one method for repetition `rep`. Deterministic.
double run_method(MethodId method, const DatasetBundle& data, const TeacherSet& teachers,
                  const RunConfig& cfg, std::size_t rep);

struct ReportRow {
    std::string method;
    std::uint64_t seed = 0;
    double lambda = 0.0;
    double accuracy = 0.0;
};

struct MethodAggregate {
    std::string method;
    double lambda = 0.0;
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation (0 when n == 1)
    std::size_t count = 0;
};

struct ExperimentReport {
    std::vector<ReportRow> rows;
    std::uint64_t master_seed = 0;

    /// Grouped by (method, lambda) in first-appearance order.
    std::vector<MethodAggregate> aggregates() const;
    double mean_accuracy(const std::string& method) const;
};

/// Table 2 analogue: all five methods, num_seeds repetitions each.
ExperimentReport compare_methods(const DatasetBundle& data, const TeacherSet& teachers,
                                 const RunConfig& cfg);

/// Distillation data-source ablation: labeled_only / unlabeled_only / both.
ExperimentReport ablation_data_sources(const DatasetBundle& data, const TeacherSet& teachers,
                                       const RunConfig& cfg);

/// Weighting-mechanism ablation: full, then each weighting switched off.
ExperimentReport ablation_weighting(const DatasetBundle& data, const TeacherSet& teachers,
                                    const RunConfig& cfg);

/// Accuracy versus lambda over cfg.lambda_grid.
ExperimentReport sweep_lambda(const DatasetBundle& data, const TeacherSet& teachers,
                              const RunConfig& cfg);

/// CSV with header `method,seed,lambda,accuracy`; accuracy fixed to 6 decimals.
void write_csv(const ExperimentReport& report, const std::filesystem::path& path);

/// Full report with config snapshot, rows, and per-method aggregates.
void write_json(const ExperimentReport& report, const RunConfig& cfg,
                const std::filesystem::path& path);

/// Human-readable aligned table.
void print_table(const ExperimentReport& report, std::ostream& out);

}  // namespace enskd
