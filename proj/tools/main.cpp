// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0
//
// enskd command line: synthetic data generation, teacher/student training,
// method comparison, ablations, and the lambda sweep.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "enskd/checkpoint.hpp"
#include "enskd/config.hpp"
#include "enskd/experiment.hpp"
#include "enskd/train.hpp"

namespace fs = std::filesystem;
using namespace enskd;

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;
    std::string data_dir;
};

void add_config_options(CLI::App* cmd, CommonArgs& args, bool lambda_is_grid = false) {
    cmd->add_option("--config", args.config_path,
                    "config file: key = value lines, or JSON (by .json extension)");
    for (const auto& key : config_keys()) {
        if (lambda_is_grid && key.name == "lambda") continue;
        cmd->add_option_function<std::string>(
            "--" + key.name,
            [&args, name = key.name](const std::string& v) { args.overrides.emplace_back(name, v); },
            key.help);
    }
    if (lambda_is_grid) {
        cmd->add_option_function<std::string>(
            "--lambda",
            [&args](const std::string& v) { args.overrides.emplace_back("lambda_grid", v); },
            "comma-separated lambda values to sweep");
    }
}

RunConfig resolve_config(const CommonArgs& args) {
    RunConfig cfg;
    if (!args.config_path.empty()) cfg = load_config(args.config_path);
    for (const auto& [key, value] : args.overrides) apply_override(cfg, key, value);
    cfg.validate();
#ifdef _OPENMP
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
    return cfg;
}

DatasetBundle resolve_dataset(const CommonArgs& args, const RunConfig& cfg) {
    if (!args.data_dir.empty()) return load_dataset(args.data_dir, cfg);
    return build_dataset(cfg);
}

void save_teacher_checkpoints(const fs::path& dir, const TeacherSet& teachers,
                              const RunConfig& cfg) {
    const SeedScheme seeds{cfg.seed};
    for (std::size_t i = 0; i < teachers.params.size(); ++i) {
        Checkpoint ckpt;
        ckpt.architecture = cfg.architecture();
        ckpt.parameters = teachers.params[i];
        ckpt.metadata = {seeds.teacher(i), cfg.teacher_epochs, teachers.final_train_loss[i],
                         utc_timestamp()};
        save_checkpoint(dir / ("teacher_" + std::to_string(i) + ".json"), ckpt);
    }
}

std::vector<Checkpoint> load_teacher_checkpoints(const fs::path& dir) {
    std::vector<Checkpoint> out;
    for (std::size_t i = 0;; ++i) {
        const fs::path p = dir / ("teacher_" + std::to_string(i) + ".json");
        if (!fs::exists(p)) break;
        out.push_back(load_checkpoint(p));
    }
    if (out.size() < 2) {
        throw std::runtime_error("need at least 2 teacher checkpoints in '" + dir.string() +
                                 "' (teacher_0.json, teacher_1.json, ...)");
    }
    for (const auto& c : out) {
        if (!(c.architecture == out.front().architecture)) {
            throw std::runtime_error("teacher checkpoints disagree on architecture");
        }
    }
    return out;
}

void write_reports(const ExperimentReport& report, const RunConfig& cfg, const fs::path& dir) {
    write_csv(report, dir / "report.csv");
    write_json(report, cfg, dir / "report.json");
    print_table(report, std::cout);
    std::cout << "report: " << (dir / "report.csv").string() << "\n";
}

int cmd_gen_data(const CommonArgs& args) {
    const RunConfig cfg = resolve_config(args);
    const DatasetBundle data = build_dataset(cfg);
    const fs::path dir = make_run_dir(cfg);
    save_csv(dir / "labeled_train.csv", data.split.labeled_train);
    save_csv(dir / "unlabeled_train.csv", data.split.unlabeled_train);
    if (!data.split.validation.empty()) save_csv(dir / "validation.csv", data.split.validation);
    save_csv(dir / "test.csv", data.split.test);
    std::cout << "run directory: " << dir.string() << "\n"
              << "labeled_train: " << data.split.labeled_train.size() << " rows\n"
              << "unlabeled_train: " << data.split.unlabeled_train.size() << " rows\n"
              << "validation: " << data.split.validation.size() << " rows\n"
              << "test: " << data.split.test.size() << " rows\n";
    return 0;
}

int cmd_train_teachers(const CommonArgs& args) {
    const RunConfig cfg = resolve_config(args);
    const DatasetBundle data = resolve_dataset(args, cfg);
    const fs::path dir = make_run_dir(cfg);
    std::cout << "run directory: " << dir.string() << "\n";
    const TeacherSet teachers = train_teachers(data, cfg);
    save_teacher_checkpoints(dir, teachers, cfg);
    for (std::size_t i = 0; i < teachers.params.size(); ++i) {
        std::cout << "teacher " << i << ": test accuracy " << teachers.test_accuracy[i]
                  << ", final train loss " << teachers.final_train_loss[i] << "\n";
    }
    std::cout << "ensemble test accuracy: "
              << ensemble_accuracy(teachers.params, cfg.architecture().activation, data.split.test,
                                   cfg.exec_mode())
              << "\n";
    return 0;
}

int cmd_distill(const CommonArgs& args, const std::string& teachers_dir,
                const std::string& method_name) {
    const RunConfig cfg = resolve_config(args);
    const MethodId method = method_from_string(method_name);
    if (method == MethodId::Single || method == MethodId::Ensemble) {
        throw std::runtime_error("method '" + method_name +
                                 "' does not train a student; use compare or evaluate");
    }
    const std::vector<Checkpoint> ckpts = load_teacher_checkpoints(teachers_dir);
    const MlpArchitecture arch = ckpts.front().architecture;

    RunConfig run_cfg = cfg;
    run_cfg.input_dim = arch.input_dim;
    run_cfg.num_classes = arch.num_classes;
    run_cfg.hidden_dims = arch.hidden_dims;
    run_cfg.activation = to_string(arch.activation);

    const DatasetBundle data = resolve_dataset(args, run_cfg);
    TeacherSet teachers;
    for (const auto& c : ckpts) {
        teachers.params.push_back(c.parameters);
        teachers.test_accuracy.push_back(
            evaluate_accuracy(c.parameters, arch.activation, data.split.test, run_cfg.exec_mode()));
        teachers.final_train_loss.push_back(c.metadata.final_train_loss);
    }

    const fs::path dir = make_run_dir(run_cfg);
    std::cout << "run directory: " << dir.string() << "\n";

    const SeedScheme seeds{run_cfg.seed};
    const bool use_labeled = method != MethodId::KdUnlabeled;
    const bool use_unlabeled = method != MethodId::KdLabeled;
    DistillConfig distill_cfg = run_cfg.distill();
    if (method != MethodId::UniKd) {
        distill_cfg.enable_teacher_weighting = false;
        distill_cfg.enable_labeled_loss_weighting = false;
        distill_cfg.enable_disagreement_weighting = false;
    }

    std::ofstream loss_log;
    if (run_cfg.log_breakdowns) loss_log.open(dir / "loss_log.jsonl");

    static const std::vector<LabeledExample> no_labeled;
    static const std::vector<UnlabeledExample> no_unlabeled;
    const TrainResult result = train_student(
        arch, teachers.params, use_labeled ? data.split.labeled_train : no_labeled,
        use_unlabeled ? data.split.unlabeled_train : no_unlabeled, distill_cfg,
        run_cfg.student_epochs, run_cfg.optimizer_config(), seeds.student(0), run_cfg.exec_mode(),
        run_cfg.log_breakdowns ? &loss_log : nullptr);

    Checkpoint student;
    student.architecture = arch;
    student.parameters = result.params;
    student.metadata = {seeds.student(0), run_cfg.student_epochs, result.final_train_loss,
                        utc_timestamp()};
    save_checkpoint(dir / ("student_" + method_name + ".json"), student);

    const double acc =
        evaluate_accuracy(result.params, arch.activation, data.split.test, run_cfg.exec_mode());
    std::cout << "student (" << method_name << ") test accuracy: " << acc << "\n";
    return 0;
}

int cmd_evaluate(const CommonArgs& args, const std::string& checkpoint_path,
                 const std::string& data_csv) {
    const RunConfig cfg = resolve_config(args);
    const Checkpoint ckpt = load_checkpoint(checkpoint_path);
    std::vector<LabeledExample> rows;
    if (!data_csv.empty()) {
        rows = load_csv(data_csv);
    } else if (!args.data_dir.empty()) {
        rows = load_csv(fs::path(args.data_dir) / "test.csv");
    } else {
        throw std::runtime_error("evaluate requires --data <csv> or --data-dir <dir>");
    }
    const double acc =
        evaluate_accuracy(ckpt.parameters, ckpt.architecture.activation, rows, cfg.exec_mode());
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", acc);
    std::cout << "accuracy: " << buf << " (" << rows.size() << " rows)\n";
    return 0;
}

int cmd_compare(const CommonArgs& args) {
    const RunConfig cfg = resolve_config(args);
    const DatasetBundle data = resolve_dataset(args, cfg);
    const fs::path dir = make_run_dir(cfg);
    std::cout << "run directory: " << dir.string() << "\n";
    const TeacherSet teachers = train_teachers(data, cfg);
    save_teacher_checkpoints(dir, teachers, cfg);
    const ExperimentReport report = compare_methods(data, teachers, cfg);
    write_reports(report, cfg, dir);
    return 0;
}

int cmd_ablate(const CommonArgs& args, const std::string& which) {
    if (which != "all" && which != "data" && which != "weighting") {
        throw std::runtime_error("--which must be all, data, or weighting");
    }
    const RunConfig cfg = resolve_config(args);
    const DatasetBundle data = resolve_dataset(args, cfg);
    const fs::path dir = make_run_dir(cfg);
    std::cout << "run directory: " << dir.string() << "\n";
    const TeacherSet teachers = train_teachers(data, cfg);
    ExperimentReport report;
    report.master_seed = cfg.seed;
    if (which == "all" || which == "data") {
        const ExperimentReport r = ablation_data_sources(data, teachers, cfg);
        report.rows.insert(report.rows.end(), r.rows.begin(), r.rows.end());
    }
    if (which == "all" || which == "weighting") {
        const ExperimentReport r = ablation_weighting(data, teachers, cfg);
        report.rows.insert(report.rows.end(), r.rows.begin(), r.rows.end());
    }
    write_reports(report, cfg, dir);
    return 0;
}

int cmd_sweep(const CommonArgs& args) {
    const RunConfig cfg = resolve_config(args);
    const DatasetBundle data = resolve_dataset(args, cfg);
    const fs::path dir = make_run_dir(cfg);
    std::cout << "run directory: " << dir.string() << "\n";
    const TeacherSet teachers = train_teachers(data, cfg);
    const ExperimentReport report = sweep_lambda(data, teachers, cfg);
    write_reports(report, cfg, dir);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"enskd: ensemble knowledge distillation at desk scale"};
    app.require_subcommand(1);

    CommonArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen-data", "generate a synthetic dataset and write CSVs");
    add_config_options(gen, gen_args);

    CommonArgs teach_args;
    CLI::App* teach = app.add_subcommand("train-teachers", "train the teacher ensemble");
    add_config_options(teach, teach_args);
    teach->add_option("--data-dir", teach_args.data_dir, "load data CSVs from this directory");

    CommonArgs distill_args;
    std::string teachers_dir;
    std::string distill_method = "unikd";
    CLI::App* dist = app.add_subcommand("distill", "train a student from teacher checkpoints");
    add_config_options(dist, distill_args);
    dist->add_option("--data-dir", distill_args.data_dir, "load data CSVs from this directory");
    dist->add_option("--teachers", teachers_dir, "directory containing teacher_<i>.json")
        ->required();
    dist->add_option("--method", distill_method, "kd_labeled, kd_unlabeled, or unikd");

    CommonArgs eval_args;
    std::string checkpoint_path;
    std::string eval_csv;
    CLI::App* eval = app.add_subcommand("evaluate", "evaluate a checkpoint on labeled data");
    add_config_options(eval, eval_args);
    eval->add_option("--checkpoint", checkpoint_path, "model checkpoint to evaluate")->required();
    eval->add_option("--data", eval_csv, "labeled CSV to evaluate on");
    eval->add_option("--data-dir", eval_args.data_dir, "directory containing test.csv");

    CommonArgs compare_args;
    CLI::App* compare = app.add_subcommand("compare", "run all five methods and report accuracy");
    add_config_options(compare, compare_args);
    compare->add_option("--data-dir", compare_args.data_dir, "load data CSVs from this directory");

    CommonArgs ablate_args;
    std::string which = "all";
    CLI::App* ablate = app.add_subcommand("ablate", "data-source and weighting ablations");
    add_config_options(ablate, ablate_args);
    ablate->add_option("--data-dir", ablate_args.data_dir, "load data CSVs from this directory");
    ablate->add_option("--which", which, "all, data, or weighting");

    CommonArgs sweep_args;
    CLI::App* sweep = app.add_subcommand("sweep", "accuracy versus lambda");
    add_config_options(sweep, sweep_args, /*lambda_is_grid=*/true);
    sweep->add_option("--data-dir", sweep_args.data_dir, "load data CSVs from this directory");

    try {
        app.parse(argc, argv);
        if (gen->parsed()) return cmd_gen_data(gen_args);
        if (teach->parsed()) return cmd_train_teachers(teach_args);
        if (dist->parsed()) return cmd_distill(distill_args, teachers_dir, distill_method);
        if (eval->parsed()) return cmd_evaluate(eval_args, checkpoint_path, eval_csv);
        if (compare->parsed()) return cmd_compare(compare_args);
        if (ablate->parsed()) return cmd_ablate(ablate_args, which);
        if (sweep->parsed()) return cmd_sweep(sweep_args);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::cerr << "run '" << argv[0] << " --help' for usage\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
