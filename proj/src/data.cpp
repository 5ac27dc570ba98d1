// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0

#include "enskd/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "enskd/rng.hpp"

namespace enskd {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (const std::exception&) {
        return false;
    }
}

bool parse_int(const std::string& s, long& out) {
    try {
        std::size_t pos = 0;
        out = std::stol(s, &pos);
        return pos == s.size();
    } catch (const std::exception&) {
        return false;
    }
}

struct Header {
    std::vector<int> feature_of_column;  // feature index per column, -1 for the label column
    int label_column = -1;
    int num_features = 0;
};

Header parse_header(const std::string& line, const CsvSchema& schema,
                    const std::filesystem::path& path) {
    Header h;
    const auto cols = split_line(line);
    std::vector<int> feature_indices;
    h.feature_of_column.assign(cols.size(), -1);
    for (std::size_t i = 0; i < cols.size(); ++i) {
        const std::string name = trim(cols[i]);
        if (schema.has_label && name == schema.label_column) {
            if (h.label_column >= 0) {
                throw CsvError(CsvErrorKind::UnknownColumn,
                               path.string() + ": duplicate label column '" + name + "'");
            }
            h.label_column = static_cast<int>(i);
            continue;
        }
        long fi = -1;
        if (name.size() >= 2 && name[0] == 'f' && parse_int(name.substr(1), fi) && fi >= 0) {
            h.feature_of_column[i] = static_cast<int>(fi);
            feature_indices.push_back(static_cast<int>(fi));
            continue;
        }
        throw CsvError(CsvErrorKind::UnknownColumn,
                       path.string() + ": unknown column '" + name + "'");
    }
    if (schema.has_label && h.label_column < 0) {
        throw CsvError(CsvErrorKind::MissingColumn,
                       path.string() + ": missing label column '" + schema.label_column + "'");
    }
    std::sort(feature_indices.begin(), feature_indices.end());
    for (std::size_t i = 0; i < feature_indices.size(); ++i) {
        if (feature_indices[i] != static_cast<int>(i)) {
            throw CsvError(CsvErrorKind::UnknownColumn,
                           path.string() + ": feature columns must be contiguous f0..fk");
        }
    }
    h.num_features = static_cast<int>(feature_indices.size());
    if (h.num_features == 0) {
        throw CsvError(CsvErrorKind::MissingColumn, path.string() + ": no feature columns");
    }
    return h;
}

}  // namespace

std::vector<LabeledExample> load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) {
        throw CsvError(CsvErrorKind::MissingFile, "cannot open file '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw CsvError(CsvErrorKind::MalformedRow, path.string() + ": empty file (no header)");
    }
    const Header header = parse_header(line, schema, path);

    std::vector<LabeledExample> rows;
    std::map<std::string, int> label_map;  // first-appearance order
    long row_num = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++row_num;
        const auto fields = split_line(line);
        if (fields.size() != header.feature_of_column.size()) {
            throw CsvError(CsvErrorKind::MalformedRow,
                           path.string() + ": row " + std::to_string(row_num) + ": expected " +
                               std::to_string(header.feature_of_column.size()) + " fields, got " +
                               std::to_string(fields.size()),
                           row_num);
        }
        LabeledExample ex;
        ex.features.assign(header.num_features, 0.0);
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const std::string value = trim(fields[i]);
            if (static_cast<int>(i) == header.label_column) {
                long as_int = 0;
                if (parse_int(value, as_int)) {
                    if (as_int < 0) {
                        throw CsvError(CsvErrorKind::MalformedRow,
                                       path.string() + ": row " + std::to_string(row_num) +
                                           ": negative label",
                                       row_num);
                    }
                    ex.label = static_cast<int>(as_int);
                } else {
                    auto [it, inserted] =
                        label_map.try_emplace(value, static_cast<int>(label_map.size()));
                    (void)inserted;
                    ex.label = it->second;
                }
                continue;
            }
            const int fi = header.feature_of_column[i];
            double x = 0.0;
            if (!parse_double(value, x) || !std::isfinite(x)) {
                throw CsvError(CsvErrorKind::NonNumericFeature,
                               path.string() + ": row " + std::to_string(row_num) +
                                   ": non-numeric feature '" + value + "' in column f" +
                                   std::to_string(fi),
                               row_num);
            }
            ex.features[fi] = x;
        }
        rows.push_back(std::move(ex));
    }
    return rows;
}

std::vector<UnlabeledExample> load_unlabeled_csv(const std::filesystem::path& path) {
    CsvSchema schema;
    schema.has_label = false;
    std::ifstream in(path);
    if (!in) {
        throw CsvError(CsvErrorKind::MissingFile, "cannot open file '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw CsvError(CsvErrorKind::MalformedRow, path.string() + ": empty file (no header)");
    }
    const Header header = parse_header(line, schema, path);
    std::vector<UnlabeledExample> rows;
    long row_num = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++row_num;
        const auto fields = split_line(line);
        if (fields.size() != header.feature_of_column.size()) {
            throw CsvError(CsvErrorKind::MalformedRow,
                           path.string() + ": row " + std::to_string(row_num) + ": expected " +
                               std::to_string(header.feature_of_column.size()) + " fields, got " +
                               std::to_string(fields.size()),
                           row_num);
        }
        UnlabeledExample ex;
        ex.features.assign(header.num_features, 0.0);
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const int fi = header.feature_of_column[i];
            const std::string value = trim(fields[i]);
            double x = 0.0;
            if (!parse_double(value, x) || !std::isfinite(x)) {
                throw CsvError(CsvErrorKind::NonNumericFeature,
                               path.string() + ": row " + std::to_string(row_num) +
                                   ": non-numeric feature '" + value + "' in column f" +
                                   std::to_string(fi),
                               row_num);
            }
            ex.features[fi] = x;
        }
        rows.push_back(std::move(ex));
    }
    return rows;
}

namespace {

// %.17g round-trips doubles exactly.
std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_header(std::ofstream& out, std::size_t num_features, bool with_label) {
    for (std::size_t i = 0; i < num_features; ++i) {
        if (i) out << ',';
        out << 'f' << i;
    }
    if (with_label) out << ",label";
    out << '\n';
}

}  // namespace

void save_csv(const std::filesystem::path& path, const std::vector<LabeledExample>& rows) {
    std::ofstream out(path);
    if (!out) throw CsvError(CsvErrorKind::MissingFile, "cannot write file '" + path.string() + "'");
    const std::size_t nf = rows.empty() ? 0 : rows.front().features.size();
    write_header(out, nf, true);
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.features.size(); ++i) {
            if (i) out << ',';
            out << format_double(r.features[i]);
        }
        out << ',' << r.label << '\n';
    }
}

void save_csv(const std::filesystem::path& path, const std::vector<UnlabeledExample>& rows) {
    std::ofstream out(path);
    if (!out) throw CsvError(CsvErrorKind::MissingFile, "cannot write file '" + path.string() + "'");
    const std::size_t nf = rows.empty() ? 0 : rows.front().features.size();
    write_header(out, nf, false);
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.features.size(); ++i) {
            if (i) out << ',';
            out << format_double(r.features[i]);
        }
        out << '\n';
    }
}

std::vector<LabeledExample> generate_gaussian_mixture(int num_classes, int per_class,
                                                      const std::vector<std::vector<double>>& means,
                                                      double cov_scale, std::uint64_t seed) {
    if (num_classes < 2) throw std::invalid_argument("num_classes must be >= 2");
    if (per_class < 1) throw std::invalid_argument("per_class must be >= 1");
    if (!(cov_scale > 0.0)) throw std::invalid_argument("cov_scale must be > 0");
    if (static_cast<int>(means.size()) != num_classes) {
        throw std::invalid_argument("means must have num_classes entries");
    }
    const std::size_t dim = means.front().size();
    for (const auto& m : means) {
        if (m.size() != dim) throw std::invalid_argument("means must share one dimension");
    }
    Rng rng(seed);
    std::vector<LabeledExample> out;
    out.reserve(static_cast<std::size_t>(num_classes) * per_class);
    for (int c = 0; c < num_classes; ++c) {
        for (int k = 0; k < per_class; ++k) {
            LabeledExample ex;
            ex.label = c;
            ex.features.resize(dim);
            for (std::size_t d = 0; d < dim; ++d) {
                ex.features[d] = means[c][d] + cov_scale * rng.normal();
            }
            out.push_back(std::move(ex));
        }
    }
    return out;
}

SplitIndices split_indices(std::size_t n, double labeled_fraction, double val_fraction,
                           double test_fraction, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("source must be non-empty");
    if (!(labeled_fraction > 0.0) || labeled_fraction > 1.0) {
        throw std::invalid_argument("labeled_fraction must be in (0, 1]");
    }
    if (val_fraction < 0.0 || test_fraction < 0.0 ||
        labeled_fraction + val_fraction + test_fraction > 1.0 + 1e-12) {
        throw std::invalid_argument("fractions out of range");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);

    const auto count = [n](double f) {
        return static_cast<std::size_t>(std::llround(f * static_cast<double>(n)));
    };
    std::size_t n_lab = count(labeled_fraction);
    std::size_t n_val = count(val_fraction);
    std::size_t n_test = count(test_fraction);
    n_lab = std::min(n_lab, n);
    n_val = std::min(n_val, n - n_lab);
    n_test = std::min(n_test, n - n_lab - n_val);

    SplitIndices idx;
    auto it = order.begin();
    idx.labeled.assign(it, it + n_lab);
    it += n_lab;
    idx.validation.assign(it, it + n_val);
    it += n_val;
    idx.test.assign(it, it + n_test);
    it += n_test;
    idx.unlabeled.assign(it, order.end());
    return idx;
}

SplitDataset split(const std::vector<LabeledExample>& source, double labeled_fraction,
                   double val_fraction, double test_fraction, std::uint64_t seed) {
    const SplitIndices idx =
        split_indices(source.size(), labeled_fraction, val_fraction, test_fraction, seed);
    SplitDataset out;
    out.labeled_train.reserve(idx.labeled.size());
    for (std::size_t i : idx.labeled) out.labeled_train.push_back(source[i]);
    out.unlabeled_train.reserve(idx.unlabeled.size());
    for (std::size_t i : idx.unlabeled) out.unlabeled_train.push_back({source[i].features});
    out.validation.reserve(idx.validation.size());
    for (std::size_t i : idx.validation) out.validation.push_back(source[i]);
    out.test.reserve(idx.test.size());
    for (std::size_t i : idx.test) out.test.push_back(source[i]);
    return out;
}

std::vector<std::vector<std::size_t>> batches(std::size_t n, std::size_t batch_size,
                                              std::uint64_t seed, std::uint64_t epoch) {
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    std::vector<std::vector<std::size_t>> out;
    if (n == 0) return out;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    // Epoch-keyed shuffle seed; 104729 is an arbitrary prime offset multiplier.
    Rng rng(seed + 104729 * (epoch + 1));
    rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += batch_size) {
        const std::size_t end = std::min(start + batch_size, n);
        out.emplace_back(order.begin() + start, order.begin() + end);
    }
    return out;
}

std::vector<std::vector<double>> circle_means(int num_classes, int input_dim, double radius) {
    if (num_classes < 2 || input_dim < 2) {
        throw std::invalid_argument("circle_means requires num_classes >= 2 and input_dim >= 2");
    }
    std::vector<std::vector<double>> means(num_classes, std::vector<double>(input_dim, 0.0));
    for (int c = 0; c < num_classes; ++c) {
        const double angle = M_PI / 2.0 + 2.0 * M_PI * c / num_classes;
        means[c][0] = radius * std::cos(angle);
        means[c][1] = radius * std::sin(angle);
    }
    return means;
}

}  // namespace enskd
