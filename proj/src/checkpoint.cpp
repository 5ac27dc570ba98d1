// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0

#include "enskd/checkpoint.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include <json.hpp>

namespace enskd {

using nlohmann::json;

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    json j;
    j["format_version"] = ckpt.format_version;
    j["architecture"] = {
        {"input_dim", ckpt.architecture.input_dim},
        {"hidden_dims", ckpt.architecture.hidden_dims},
        {"num_classes", ckpt.architecture.num_classes},
        {"activation", to_string(ckpt.architecture.activation)},
    };
    json layers = json::array();
    for (const auto& layer : ckpt.parameters.layers) {
        json rows = json::array();
        for (int r = 0; r < layer.out_dim; ++r) {
            json row = json::array();
            for (int c = 0; c < layer.in_dim; ++c) row.push_back(layer.w(r, c));
            rows.push_back(std::move(row));
        }
        layers.push_back({{"weights", std::move(rows)}, {"bias", layer.bias}});
    }
    j["parameters"] = std::move(layers);
    j["metadata"] = {
        {"seed", ckpt.metadata.seed},
        {"epochs", ckpt.metadata.epochs},
        {"final_train_loss", ckpt.metadata.final_train_loss},
        {"created_at", ckpt.metadata.created_at},
    };
    std::ofstream out(path);
    if (!out) {
        throw CheckpointError(CheckpointErrorKind::Io,
                              "cannot write checkpoint '" + path.string() + "'");
    }
    out << j.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw CheckpointError(CheckpointErrorKind::Io,
                              "cannot open checkpoint '" + path.string() + "'");
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw CheckpointError(CheckpointErrorKind::Malformed,
                              path.string() + ": malformed checkpoint: " + e.what());
    }
    Checkpoint ckpt;
    try {
        ckpt.format_version = j.at("format_version").get<int>();
        if (ckpt.format_version != kCheckpointFormatVersion) {
            throw CheckpointError(CheckpointErrorKind::VersionMismatch,
                                  path.string() + ": unsupported format_version " +
                                      std::to_string(ckpt.format_version) + " (expected " +
                                      std::to_string(kCheckpointFormatVersion) + ")");
        }
        const json& arch = j.at("architecture");
        ckpt.architecture.input_dim = arch.at("input_dim").get<int>();
        ckpt.architecture.hidden_dims = arch.at("hidden_dims").get<std::vector<int>>();
        ckpt.architecture.num_classes = arch.at("num_classes").get<int>();
        ckpt.architecture.activation = activation_from_string(arch.at("activation").get<std::string>());

        const auto sizes = ckpt.architecture.layer_sizes();
        const json& layers = j.at("parameters");
        if (!layers.is_array() || layers.size() != sizes.size() - 1) {
            throw CheckpointError(
                CheckpointErrorKind::ShapeMismatch,
                path.string() + ": expected " + std::to_string(sizes.size() - 1) +
                    " layers, found " + std::to_string(layers.size()));
        }
        ckpt.parameters.layers.resize(layers.size());
        for (std::size_t l = 0; l < layers.size(); ++l) {
            LayerParams& layer = ckpt.parameters.layers[l];
            layer.in_dim = sizes[l];
            layer.out_dim = sizes[l + 1];
            const json& rows = layers[l].at("weights");
            if (!rows.is_array() || static_cast<int>(rows.size()) != layer.out_dim) {
                throw CheckpointError(CheckpointErrorKind::ShapeMismatch,
                                      path.string() + ": layer " + std::to_string(l) +
                                          ": weight row count mismatch");
            }
            layer.weights.reserve(static_cast<std::size_t>(layer.in_dim) * layer.out_dim);
            for (const json& row : rows) {
                if (!row.is_array() || static_cast<int>(row.size()) != layer.in_dim) {
                    throw CheckpointError(CheckpointErrorKind::ShapeMismatch,
                                          path.string() + ": layer " + std::to_string(l) +
                                              ": weight row length mismatch");
                }
                for (const json& x : row) layer.weights.push_back(x.get<double>());
            }
            const json& bias = layers[l].at("bias");
            if (!bias.is_array() || static_cast<int>(bias.size()) != layer.out_dim) {
                throw CheckpointError(CheckpointErrorKind::ShapeMismatch,
                                      path.string() + ": layer " + std::to_string(l) +
                                          ": bias length mismatch");
            }
            layer.bias = bias.get<std::vector<double>>();
        }
        const json& meta = j.at("metadata");
        ckpt.metadata.seed = meta.at("seed").get<std::uint64_t>();
        ckpt.metadata.epochs = meta.at("epochs").get<int>();
        ckpt.metadata.final_train_loss = meta.at("final_train_loss").get<double>();
        ckpt.metadata.created_at = meta.at("created_at").get<std::string>();
    } catch (const CheckpointError&) {
        throw;
    } catch (const json::exception& e) {
        throw CheckpointError(CheckpointErrorKind::Malformed,
                              path.string() + ": malformed checkpoint: " + e.what());
    }
    return ckpt;
}

}  // namespace enskd
