// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace enskd {

struct LabeledExample {
    std::vector<double> features;
    int label = 0;
};

struct UnlabeledExample {
    std::vector<double> features;
};

/// The split protocol's four disjoint partitions. Rows in unlabeled_train had
/// their labels removed at split time; this type does not retain them.
struct SplitDataset {
    std::vector<LabeledExample> labeled_train;
    std::vector<UnlabeledExample> unlabeled_train;
    std::vector<LabeledExample> validation;
    std::vector<LabeledExample> test;
};

enum class CsvErrorKind {
    MissingFile,
    MissingColumn,
    UnknownColumn,
    MalformedRow,
    NonNumericFeature,
};

class CsvError : public std::runtime_error {
public:
    CsvError(CsvErrorKind kind, std::string message, long row = -1)
        : std::runtime_error(std::move(message)), kind_(kind), row_(row) {}
    CsvErrorKind kind() const { return kind_; }
    /// 1-based data-row number, or -1 when the error is not row-specific.
    long row() const { return row_; }

private:
    CsvErrorKind kind_;
    long row_;
};

/// Column layout: feature columns f0..fk in index order plus a `label` column.
/// Comma-delimited UTF-8 with a header row. No quoting.
struct CsvSchema {
    std::string label_column = "label";
    bool has_label = true;
};

/// Loads a labeled CSV. Row order is preserved; string labels are mapped to
/// indices by first appearance. Malformed rows raise CsvError naming the
/// 1-based data row.
std::vector<LabeledExample> load_csv(const std::filesystem::path& path,
                                     const CsvSchema& schema = CsvSchema{});

/// Loads a CSV with no label column (schema.has_label is ignored).
std::vector<UnlabeledExample> load_unlabeled_csv(const std::filesystem::path& path);

void save_csv(const std::filesystem::path& path, const std::vector<LabeledExample>& rows);
void save_csv(const std::filesystem::path& path, const std::vector<UnlabeledExample>& rows);

/// Balanced isotropic Gaussian mixture: per_class draws around each mean with
/// standard deviation cov_scale. Deterministic given seed.
std::vector<LabeledExample> generate_gaussian_mixture(int num_classes, int per_class,
                                                      const std::vector<std::vector<double>>& means,
                                                      double cov_scale, std::uint64_t seed);

/// Index partition behind split(): shuffles 0..n-1 by seed and cuts
/// [labeled | validation | test | unlabeled-remainder] in that order.
struct SplitIndices {
    std::vector<std::size_t> labeled;
    std::vector<std::size_t> unlabeled;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
};

SplitIndices split_indices(std::size_t n, double labeled_fraction, double val_fraction,
                           double test_fraction, std::uint64_t seed);

/// Deterministic shuffled partition of `source`. Fractions apply to the whole
/// source; the unlabeled partition receives the remainder, with labels
/// discarded.
SplitDataset split(const std::vector<LabeledExample>& source, double labeled_fraction,
                   double val_fraction, double test_fraction, std::uint64_t seed);

/// Index batches for one epoch: a deterministic permutation keyed by
/// (seed, epoch), chunked by batch_size; the final short batch is included.
std::vector<std::vector<std::size_t>> batches(std::size_t n, std::size_t batch_size,
                                              std::uint64_t seed, std::uint64_t epoch);

/// Class means evenly spaced on a circle of the given radius in the first two
/// feature dimensions (zeros elsewhere).
std::vector<std::vector<double>> circle_means(int num_classes, int input_dim, double radius);

}  // namespace enskd
