// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0

#include "enskd/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "enskd/checkpoint.hpp"
#include "enskd/train.hpp"

namespace enskd {

using nlohmann::json;

std::string to_string(MethodId m) {
    switch (m) {
        case MethodId::Single: return "single";
        case MethodId::Ensemble: return "ensemble";
        case MethodId::KdLabeled: return "kd_labeled";
        case MethodId::KdUnlabeled: return "kd_unlabeled";
        case MethodId::UniKd: return "unikd";
    }
    throw std::logic_error("unreachable");
}

MethodId method_from_string(const std::string& s) {
    if (s == "single") return MethodId::Single;
    if (s == "ensemble") return MethodId::Ensemble;
    if (s == "kd_labeled") return MethodId::KdLabeled;
    if (s == "kd_unlabeled") return MethodId::KdUnlabeled;
    if (s == "unikd") return MethodId::UniKd;
    throw std::invalid_argument("unknown method '" + s + "'");
}

DatasetBundle build_dataset(const RunConfig& cfg) {
    cfg.validate();
    const SeedScheme seeds{cfg.seed};
    const auto means = circle_means(cfg.num_classes, cfg.input_dim, cfg.mixture_radius);
    const auto source = generate_gaussian_mixture(cfg.num_classes, cfg.rows_per_class, means,
                                                  cfg.cov_scale, seeds.data());
    const SplitIndices idx = split_indices(source.size(), cfg.labeled_fraction, cfg.val_fraction,
                                           cfg.test_fraction, seeds.data());
    DatasetBundle bundle;
    for (std::size_t i : idx.labeled) bundle.split.labeled_train.push_back(source[i]);
    for (std::size_t i : idx.unlabeled) bundle.split.unlabeled_train.push_back({source[i].features});
    for (std::size_t i : idx.validation) bundle.split.validation.push_back(source[i]);
    for (std::size_t i : idx.test) bundle.split.test.push_back(source[i]);

    bundle.teacher_train = bundle.split.labeled_train;
    if (cfg.teachers_use_unlabeled_rows) {
        for (std::size_t i : idx.unlabeled) bundle.teacher_train.push_back(source[i]);
    }
    return bundle;
}

DatasetBundle load_dataset(const std::filesystem::path& dir, const RunConfig& cfg) {
    if (cfg.teachers_use_unlabeled_rows) {
        throw ConfigError(
            "teachers_use_unlabeled_rows requires generated data; "
            "unlabeled CSV rows carry no labels to restore");
    }
    DatasetBundle bundle;
    bundle.split.labeled_train = load_csv(dir / "labeled_train.csv");
    bundle.split.unlabeled_train = load_unlabeled_csv(dir / "unlabeled_train.csv");
    bundle.split.test = load_csv(dir / "test.csv");
    if (std::filesystem::exists(dir / "validation.csv")) {
        bundle.split.validation = load_csv(dir / "validation.csv");
    }
    bundle.teacher_train = bundle.split.labeled_train;
    return bundle;
}

TeacherSet train_teachers(const DatasetBundle& data, const RunConfig& cfg) {
    cfg.validate();
    const SeedScheme seeds{cfg.seed};
    const MlpArchitecture arch = cfg.architecture();
    const OptimizerConfig opt = cfg.optimizer_config();
    const ExecMode mode = cfg.exec_mode();

    TeacherSet out;
    for (int i = 0; i < cfg.n_teachers; ++i) {
        try {
            TrainResult r = train_teacher(arch, data.teacher_train, cfg.teacher_epochs, opt,
                                          seeds.teacher(static_cast<std::size_t>(i)), mode);
            out.test_accuracy.push_back(
                evaluate_accuracy(r.params, arch.activation, data.split.test, mode));
            out.final_train_loss.push_back(r.final_train_loss);
            out.params.push_back(std::move(r.params));
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("teacher " + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

namespace {

double train_student_and_evaluate(const DatasetBundle& data, const TeacherSet& teachers,
                                  const RunConfig& cfg, const DistillConfig& distill_cfg,
                                  bool use_labeled, bool use_unlabeled, std::size_t rep) {
    static const std::vector<LabeledExample> no_labeled;
    static const std::vector<UnlabeledExample> no_unlabeled;
    const SeedScheme seeds{cfg.seed};
    const MlpArchitecture arch = cfg.architecture();
    const ExecMode mode = cfg.exec_mode();
    const TrainResult r = train_student(
        arch, teachers.params, use_labeled ? data.split.labeled_train : no_labeled,
        use_unlabeled ? data.split.unlabeled_train : no_unlabeled, distill_cfg,
        cfg.student_epochs, cfg.optimizer_config(), seeds.student(rep), mode);
    return evaluate_accuracy(r.params, arch.activation, data.split.test, mode);
}

// KD-Labeled / KD-Unlabeled are the flags-off special cases of the full
// objective, so they share the exact training code path.
DistillConfig baseline_config(const RunConfig& cfg) {
    DistillConfig d = cfg.distill();
    d.enable_teacher_weighting = false;
    d.enable_labeled_loss_weighting = false;
    d.enable_disagreement_weighting = false;
    return d;
}

}  // namespace

double run_method(MethodId method, const DatasetBundle& data, const TeacherSet& teachers,
                  const RunConfig& cfg, std::size_t rep) {
    switch (method) {
        case MethodId::Single:
            // One teacher per repetition, matching the convention that the
            // single-model row averages independently repeated models.
            return teachers.test_accuracy[rep % teachers.test_accuracy.size()];
        case MethodId::Ensemble:
            return ensemble_accuracy(teachers.params, cfg.architecture().activation,
                                     data.split.test, cfg.exec_mode());
        case MethodId::KdLabeled:
            return train_student_and_evaluate(data, teachers, cfg, baseline_config(cfg),
                                              /*use_labeled=*/true, /*use_unlabeled=*/false, rep);
        case MethodId::KdUnlabeled:
            return train_student_and_evaluate(data, teachers, cfg, baseline_config(cfg),
                                              /*use_labeled=*/false, /*use_unlabeled=*/true, rep);
        case MethodId::UniKd:
            return train_student_and_evaluate(data, teachers, cfg, cfg.distill(),
                                              /*use_labeled=*/true, /*use_unlabeled=*/true, rep);
    }
    throw std::invalid_argument("unknown method");
}

std::vector<MethodAggregate> ExperimentReport::aggregates() const {
    std::vector<MethodAggregate> out;
    auto find = [&out](const std::string& method, double lambda) -> MethodAggregate* {
        for (auto& a : out) {
            if (a.method == method && a.lambda == lambda) return &a;
        }
        return nullptr;
    };
    // Two passes: means, then sample standard deviations.
    for (const auto& row : rows) {
        MethodAggregate* a = find(row.method, row.lambda);
        if (!a) {
            out.push_back({row.method, row.lambda, 0.0, 0.0, 0});
            a = &out.back();
        }
        a->mean += row.accuracy;
        a->count += 1;
    }
    for (auto& a : out) a.mean /= static_cast<double>(a.count);
    for (const auto& row : rows) {
        MethodAggregate* a = find(row.method, row.lambda);
        const double d = row.accuracy - a->mean;
        a->stddev += d * d;
    }
    for (auto& a : out) {
        a.stddev = a.count > 1 ? std::sqrt(a.stddev / static_cast<double>(a.count - 1)) : 0.0;
    }
    return out;
}

double ExperimentReport::mean_accuracy(const std::string& method) const {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& row : rows) {
        if (row.method == method) {
            sum += row.accuracy;
            ++n;
        }
    }
    if (n == 0) throw std::invalid_argument("no rows for method '" + method + "'");
    return sum / static_cast<double>(n);
}

ExperimentReport compare_methods(const DatasetBundle& data, const TeacherSet& teachers,
                                 const RunConfig& cfg) {
    const SeedScheme seeds{cfg.seed};
    ExperimentReport report;
    report.master_seed = cfg.seed;
    const MethodId methods[] = {MethodId::Single, MethodId::Ensemble, MethodId::KdLabeled,
                                MethodId::KdUnlabeled, MethodId::UniKd};
    for (const MethodId m : methods) {
        const double lambda = m == MethodId::UniKd ? cfg.lambda : 0.0;
        for (int r = 0; r < cfg.num_seeds; ++r) {
            const auto rep = static_cast<std::size_t>(r);
            report.rows.push_back({to_string(m), seeds.repetition(rep), lambda,
                                   run_method(m, data, teachers, cfg, rep)});
        }
    }
    return report;
}

ExperimentReport ablation_data_sources(const DatasetBundle& data, const TeacherSet& teachers,
                                       const RunConfig& cfg) {
    const SeedScheme seeds{cfg.seed};
    ExperimentReport report;
    report.master_seed = cfg.seed;
    struct Variant {
        const char* name;
        bool labeled;
        bool unlabeled;
    };
    const Variant variants[] = {
        {"labeled_only", true, false},
        {"unlabeled_only", false, true},
        {"both", true, true},
    };
    for (const auto& v : variants) {
        for (int r = 0; r < cfg.num_seeds; ++r) {
            const auto rep = static_cast<std::size_t>(r);
            const double acc = train_student_and_evaluate(data, teachers, cfg, cfg.distill(),
                                                          v.labeled, v.unlabeled, rep);
            report.rows.push_back({v.name, seeds.repetition(rep), cfg.lambda, acc});
        }
    }
    return report;
}

ExperimentReport ablation_weighting(const DatasetBundle& data, const TeacherSet& teachers,
                                    const RunConfig& cfg) {
    const SeedScheme seeds{cfg.seed};
    ExperimentReport report;
    report.master_seed = cfg.seed;
    struct Variant {
        const char* name;
        bool teacher_w;
        bool labeled_w;
        bool disagreement_w;
    };
    const Variant variants[] = {
        {"full", true, true, true},
        {"no_teacher_weighting", false, true, true},
        {"no_labeled_loss_weighting", true, false, true},
        {"no_disagreement_weighting", true, true, false},
    };
    for (const auto& v : variants) {
        DistillConfig d = cfg.distill();
        d.enable_teacher_weighting = v.teacher_w;
        d.enable_labeled_loss_weighting = v.labeled_w;
        d.enable_disagreement_weighting = v.disagreement_w;
        const double lambda = v.disagreement_w ? cfg.lambda : 0.0;
        for (int r = 0; r < cfg.num_seeds; ++r) {
            const auto rep = static_cast<std::size_t>(r);
            const double acc =
                train_student_and_evaluate(data, teachers, cfg, d, true, true, rep);
            report.rows.push_back({v.name, seeds.repetition(rep), lambda, acc});
        }
    }
    return report;
}

ExperimentReport sweep_lambda(const DatasetBundle& data, const TeacherSet& teachers,
                              const RunConfig& cfg) {
    const SeedScheme seeds{cfg.seed};
    ExperimentReport report;
    report.master_seed = cfg.seed;
    for (const double lambda : cfg.lambda_grid) {
        DistillConfig d = cfg.distill();
        d.lambda = lambda;
        for (int r = 0; r < cfg.num_seeds; ++r) {
            const auto rep = static_cast<std::size_t>(r);
            const double acc =
                train_student_and_evaluate(data, teachers, cfg, d, true, true, rep);
            report.rows.push_back({"unikd", seeds.repetition(rep), lambda, acc});
        }
    }
    return report;
}

namespace {

std::string format_accuracy(double acc) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", acc);
    return buf;
}

std::string format_lambda(double lambda) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", lambda);
    return buf;
}

}  // namespace

void write_csv(const ExperimentReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report '" + path.string() + "'");
    out << "method,seed,lambda,accuracy\n";
    for (const auto& row : report.rows) {
        out << row.method << ',' << row.seed << ',' << format_lambda(row.lambda) << ','
            << format_accuracy(row.accuracy) << '\n';
    }
}

void write_json(const ExperimentReport& report, const RunConfig& cfg,
                const std::filesystem::path& path) {
    json j;
    j["config"] = json::parse(config_to_json(cfg));
    j["master_seed"] = report.master_seed;
    j["created_at"] = utc_timestamp();
    json rows = json::array();
    for (const auto& row : report.rows) {
        rows.push_back({{"method", row.method},
                        {"seed", row.seed},
                        {"lambda", row.lambda},
                        {"accuracy", row.accuracy}});
    }
    j["rows"] = std::move(rows);
    json aggs = json::array();
    for (const auto& a : report.aggregates()) {
        aggs.push_back({{"method", a.method},
                        {"lambda", a.lambda},
                        {"mean", a.mean},
                        {"stddev", a.stddev},
                        {"count", a.count}});
    }
    j["aggregates"] = std::move(aggs);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

void print_table(const ExperimentReport& report, std::ostream& out) {
    const auto aggs = report.aggregates();
    std::size_t name_width = 10;
    for (const auto& a : aggs) name_width = std::max(name_width, a.method.size() + 2);
    const bool multi_lambda = [&] {
        for (const auto& a : aggs) {
            if (a.lambda != aggs.front().lambda) return true;
        }
        return false;
    }();

    out << std::left << std::setw(static_cast<int>(name_width)) << "method";
    if (multi_lambda) out << std::right << std::setw(8) << "lambda";
    out << std::right << std::setw(10) << "mean" << std::setw(10) << "std" << std::setw(7) << "n"
        << "  per-seed\n";
    for (const auto& a : aggs) {
        out << std::left << std::setw(static_cast<int>(name_width)) << a.method;
        if (multi_lambda) out << std::right << std::setw(8) << format_lambda(a.lambda);
        out << std::right << std::setw(10) << format_accuracy(a.mean) << std::setw(10)
            << format_accuracy(a.stddev) << std::setw(7) << a.count << "  ";
        bool first = true;
        for (const auto& row : report.rows) {
            if (row.method == a.method && row.lambda == a.lambda) {
                if (!first) out << ' ';
                out << format_accuracy(row.accuracy);
                first = false;
            }
        }
        out << '\n';
    }
}

}  // namespace enskd
