// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0

#include "enskd/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "enskd/checkpoint.hpp"

namespace enskd {

using nlohmann::json;

MlpArchitecture RunConfig::architecture() const {
    MlpArchitecture arch;
    arch.input_dim = input_dim;
    arch.hidden_dims = hidden_dims;
    arch.num_classes = num_classes;
    arch.activation = activation_from_string(activation);
    return arch;
}

DistillConfig RunConfig::distill() const {
    DistillConfig d;
    d.lambda = lambda;
    d.weight_mode = weight_mode_from_string(weight_mode);
    d.enable_teacher_weighting = enable_teacher_weighting;
    d.enable_labeled_loss_weighting = enable_labeled_loss_weighting;
    d.enable_disagreement_weighting = enable_disagreement_weighting;
    d.combine_policy = combine_policy_from_string(combine_policy);
    d.eps_log = eps_log;
    d.eps_w = eps_w;
    return d;
}

OptimizerConfig RunConfig::optimizer_config() const {
    OptimizerConfig o;
    o.kind = optimizer_kind_from_string(optimizer);
    o.learning_rate = learning_rate;
    o.batch_size = static_cast<std::size_t>(batch_size);
    o.beta1 = adam_beta1;
    o.beta2 = adam_beta2;
    o.epsilon = adam_epsilon;
    return o;
}

ExecMode RunConfig::exec_mode() const {
    return parallel ? ExecMode::OpenMP : ExecMode::Serial;
}

void RunConfig::validate() const {
    const auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (num_classes < 2) fail("num_classes must be >= 2");
    if (input_dim < 1) fail("input_dim must be >= 1");
    if (rows_per_class < 1) fail("rows_per_class must be >= 1");
    if (!(cov_scale > 0.0)) fail("cov_scale must be > 0");
    if (!(labeled_fraction > 0.0) || labeled_fraction > 1.0) {
        fail("labeled_fraction must be in (0, 1]");
    }
    if (val_fraction < 0.0 || test_fraction < 0.0 ||
        labeled_fraction + val_fraction + test_fraction > 1.0 + 1e-12) {
        fail("labeled_fraction + val_fraction + test_fraction must be <= 1");
    }
    for (int h : hidden_dims) {
        if (h < 1) fail("hidden_dims entries must be >= 1");
    }
    if (!(learning_rate > 0.0)) fail("learning_rate must be > 0");
    if (batch_size < 1) fail("batch_size must be >= 1");
    if (n_teachers < 2) fail("n_teachers must be >= 2");
    if (teacher_epochs < 1) fail("teacher_epochs must be >= 1");
    if (student_epochs < 1) fail("student_epochs must be >= 1");
    if (lambda < 0.0) fail("lambda must be >= 0");
    if (num_seeds < 1) fail("num_seeds must be >= 1");
    if (threads < 0) fail("threads must be >= 0");
    for (double l : lambda_grid) {
        if (l < 0.0) fail("lambda_grid entries must be >= 0");
    }
    if (lambda_grid.empty()) fail("lambda_grid must be non-empty");
    // Enum-like strings are validated by their converters.
    (void)architecture();
    (void)distill();
    (void)optimizer_config();
}

namespace {

bool parse_bool(const std::string& s, bool& out) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") {
        out = true;
        return true;
    }
    if (s == "false" || s == "0" || s == "no" || s == "off") {
        out = false;
        return true;
    }
    return false;
}

template <typename T>
std::vector<T> parse_list(const std::string& s, const std::string& key) {
    std::vector<T> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) {
            throw ConfigError("config key '" + key + "': empty list entry");
        }
        item = item.substr(b, e - b + 1);
        try {
            std::size_t pos = 0;
            if constexpr (std::is_same_v<T, int>) {
                out.push_back(std::stoi(item, &pos));
            } else {
                out.push_back(std::stod(item, &pos));
            }
            if (pos != item.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': cannot parse list entry '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

struct KeyHandler {
    std::string help;
    std::function<void(RunConfig&, const std::string&)> set;
};

template <typename Member>
KeyHandler int_key(Member member, std::string help) {
    return {std::move(help), [member](RunConfig& cfg, const std::string& v) {
                try {
                    std::size_t pos = 0;
                    cfg.*member = std::stoi(v, &pos);
                    if (pos != v.size()) throw std::invalid_argument("trailing characters");
                } catch (const std::exception&) {
                    throw ConfigError("expected an integer, got '" + v + "'");
                }
            }};
}

template <typename Member>
KeyHandler double_key(Member member, std::string help) {
    return {std::move(help), [member](RunConfig& cfg, const std::string& v) {
                try {
                    std::size_t pos = 0;
                    cfg.*member = std::stod(v, &pos);
                    if (pos != v.size() || !std::isfinite(cfg.*member)) {
                        throw std::invalid_argument("bad number");
                    }
                } catch (const std::exception&) {
                    throw ConfigError("expected a number, got '" + v + "'");
                }
            }};
}

template <typename Member>
KeyHandler bool_key(Member member, std::string help) {
    return {std::move(help), [member](RunConfig& cfg, const std::string& v) {
                bool b = false;
                if (!parse_bool(v, b)) {
                    throw ConfigError("expected true/false, got '" + v + "'");
                }
                cfg.*member = b;
            }};
}

template <typename Member>
KeyHandler string_key(Member member, std::string help) {
    return {std::move(help),
            [member](RunConfig& cfg, const std::string& v) { cfg.*member = v; }};
}

const std::vector<std::pair<std::string, KeyHandler>>& key_table() {
    static const std::vector<std::pair<std::string, KeyHandler>> table = {
        {"num_classes", int_key(&RunConfig::num_classes, "number of classes C (>= 2)")},
        {"input_dim", int_key(&RunConfig::input_dim, "feature dimension")},
        {"rows_per_class", int_key(&RunConfig::rows_per_class, "generated rows per class")},
        {"mixture_radius",
         double_key(&RunConfig::mixture_radius, "radius of the circle of class means")},
        {"cov_scale", double_key(&RunConfig::cov_scale, "isotropic std dev of each class cloud")},
        {"labeled_fraction",
         double_key(&RunConfig::labeled_fraction, "fraction of the source kept labeled")},
        {"val_fraction", double_key(&RunConfig::val_fraction, "fraction held out for validation")},
        {"test_fraction", double_key(&RunConfig::test_fraction, "fraction held out for test")},
        {"teachers_use_unlabeled_rows",
         bool_key(&RunConfig::teachers_use_unlabeled_rows,
                  "train teachers on unlabeled rows with their original labels restored "
                  "(generated data only)")},
        {"hidden_dims",
         {"comma-separated hidden layer widths",
          [](RunConfig& cfg, const std::string& v) {
              cfg.hidden_dims = parse_list<int>(v, "hidden_dims");
          }}},
        {"activation", string_key(&RunConfig::activation, "relu or tanh")},
        {"optimizer", string_key(&RunConfig::optimizer, "adam or sgd")},
        {"learning_rate", double_key(&RunConfig::learning_rate, "optimizer step size")},
        {"batch_size", int_key(&RunConfig::batch_size, "minibatch size")},
        {"adam_beta1", double_key(&RunConfig::adam_beta1, "Adam first-moment decay")},
        {"adam_beta2", double_key(&RunConfig::adam_beta2, "Adam second-moment decay")},
        {"adam_epsilon", double_key(&RunConfig::adam_epsilon, "Adam denominator epsilon")},
        {"n_teachers", int_key(&RunConfig::n_teachers, "ensemble size N (>= 2)")},
        {"teacher_epochs", int_key(&RunConfig::teacher_epochs, "teacher training epochs")},
        {"student_epochs", int_key(&RunConfig::student_epochs, "student training epochs")},
        {"lambda", double_key(&RunConfig::lambda, "disagreement weighting coefficient")},
        {"weight_mode",
         string_key(&RunConfig::weight_mode, "inverse_loss or literal_eq1 teacher weighting")},
        {"enable_teacher_weighting",
         bool_key(&RunConfig::enable_teacher_weighting,
                  "weight teachers by per-sample correctness on labeled data")},
        {"enable_labeled_loss_weighting",
         bool_key(&RunConfig::enable_labeled_loss_weighting,
                  "scale the labeled distillation loss by 1/(1 + mean teacher loss)")},
        {"enable_disagreement_weighting",
         bool_key(&RunConfig::enable_disagreement_weighting,
                  "scale the unlabeled distillation loss by (1 + lambda * disagreement)")},
        {"combine_policy", string_key(&RunConfig::combine_policy, "sum or interleave")},
        {"eps_log", double_key(&RunConfig::eps_log, "probability clamp before logarithms")},
        {"eps_w", double_key(&RunConfig::eps_w, "loss offset before inversion in inverse_loss")},
        {"num_seeds", int_key(&RunConfig::num_seeds, "repetitions per method")},
        {"seed",
         {"master seed",
          [](RunConfig& cfg, const std::string& v) {
              try {
                  std::size_t pos = 0;
                  cfg.seed = std::stoull(v, &pos);
                  if (pos != v.size()) throw std::invalid_argument("trailing characters");
              } catch (const std::exception&) {
                  throw ConfigError("expected a nonnegative integer, got '" + v + "'");
              }
          }}},
        {"out_dir", string_key(&RunConfig::out_dir, "directory for run outputs")},
        {"lambda_grid",
         {"comma-separated lambda values for sweep",
          [](RunConfig& cfg, const std::string& v) {
              cfg.lambda_grid = parse_list<double>(v, "lambda_grid");
          }}},
        {"log_breakdowns",
         bool_key(&RunConfig::log_breakdowns, "write per-sample loss breakdowns as JSONL")},
        {"parallel", bool_key(&RunConfig::parallel, "use the OpenMP kernels")},
        {"threads", int_key(&RunConfig::threads, "OpenMP thread count (0 = runtime default)")},
    };
    return table;
}

const KeyHandler& find_key(const std::string& key) {
    for (const auto& [name, handler] : key_table()) {
        if (name == key) return handler;
    }
    throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

const std::vector<ConfigKeyInfo>& config_keys() {
    static const std::vector<ConfigKeyInfo> keys = [] {
        std::vector<ConfigKeyInfo> out;
        for (const auto& [name, handler] : key_table()) out.push_back({name, handler.help});
        return out;
    }();
    return keys;
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    const KeyHandler& handler = find_key(key);
    try {
        handler.set(cfg, value);
    } catch (const ConfigError& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
    }
}

namespace {

RunConfig load_ini(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    RunConfig cfg;
    std::string line;
    long line_num = 0;
    while (std::getline(in, line)) {
        ++line_num;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path.string() + ":" + std::to_string(line_num) +
                              ": expected 'key = value'");
        }
        auto trim = [](std::string s) {
            const auto x = s.find_first_not_of(" \t\r");
            if (x == std::string::npos) return std::string();
            const auto y = s.find_last_not_of(" \t\r");
            return s.substr(x, y - x + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(path.string() + ":" + std::to_string(line_num) + ": empty key");
        }
        apply_override(cfg, key, value);
    }
    return cfg;
}

RunConfig load_json_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": malformed JSON: " + std::string(e.what()));
    }
    if (!j.is_object()) throw ConfigError(path.string() + ": expected a JSON object");
    RunConfig cfg;
    for (const auto& [key, value] : j.items()) {
        std::string as_string;
        if (value.is_string()) {
            as_string = value.get<std::string>();
        } else if (value.is_boolean()) {
            as_string = value.get<bool>() ? "true" : "false";
        } else if (value.is_number()) {
            as_string = value.dump();
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& item : value) {
                if (!joined.empty()) joined += ',';
                joined += item.dump();
            }
            as_string = joined;
        } else {
            throw ConfigError("config key '" + key + "': unsupported JSON value type");
        }
        apply_override(cfg, key, as_string);
    }
    return cfg;
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path) {
    if (path.extension() == ".json") return load_json_config(path);
    return load_ini(path);
}

std::string config_to_json(const RunConfig& cfg) {
    json j;
    j["num_classes"] = cfg.num_classes;
    j["input_dim"] = cfg.input_dim;
    j["rows_per_class"] = cfg.rows_per_class;
    j["mixture_radius"] = cfg.mixture_radius;
    j["cov_scale"] = cfg.cov_scale;
    j["labeled_fraction"] = cfg.labeled_fraction;
    j["val_fraction"] = cfg.val_fraction;
    j["test_fraction"] = cfg.test_fraction;
    j["teachers_use_unlabeled_rows"] = cfg.teachers_use_unlabeled_rows;
    j["hidden_dims"] = cfg.hidden_dims;
    j["activation"] = cfg.activation;
    j["optimizer"] = cfg.optimizer;
    j["learning_rate"] = cfg.learning_rate;
    j["batch_size"] = cfg.batch_size;
    j["adam_beta1"] = cfg.adam_beta1;
    j["adam_beta2"] = cfg.adam_beta2;
    j["adam_epsilon"] = cfg.adam_epsilon;
    j["n_teachers"] = cfg.n_teachers;
    j["teacher_epochs"] = cfg.teacher_epochs;
    j["student_epochs"] = cfg.student_epochs;
    j["lambda"] = cfg.lambda;
    j["weight_mode"] = cfg.weight_mode;
    j["enable_teacher_weighting"] = cfg.enable_teacher_weighting;
    j["enable_labeled_loss_weighting"] = cfg.enable_labeled_loss_weighting;
    j["enable_disagreement_weighting"] = cfg.enable_disagreement_weighting;
    j["combine_policy"] = cfg.combine_policy;
    j["eps_log"] = cfg.eps_log;
    j["eps_w"] = cfg.eps_w;
    j["num_seeds"] = cfg.num_seeds;
    j["seed"] = cfg.seed;
    j["out_dir"] = cfg.out_dir;
    j["lambda_grid"] = cfg.lambda_grid;
    j["log_breakdowns"] = cfg.log_breakdowns;
    j["parallel"] = cfg.parallel;
    j["threads"] = cfg.threads;
    return j.dump();
}

std::filesystem::path make_run_dir(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    const fs::path base(cfg.out_dir);
    fs::create_directories(base);
    std::string stamp = utc_timestamp();
    std::replace(stamp.begin(), stamp.end(), ':', '-');
    const std::string prefix = "run-" + stamp + "-seed" + std::to_string(cfg.seed);
    fs::path dir = base / prefix;
    int k = 2;
    while (fs::exists(dir)) {
        dir = base / (prefix + "-" + std::to_string(k));
        ++k;
    }
    fs::create_directories(dir);
    return dir;
}

}  // namespace enskd
