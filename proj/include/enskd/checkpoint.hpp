// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "enskd/mlp.hpp"

namespace enskd {

inline constexpr int kCheckpointFormatVersion = 1;

struct CheckpointMetadata {
    std::uint64_t seed = 0;
    int epochs = 0;
    double final_train_loss = 0.0;
    std::string created_at;  // UTC, ISO 8601
};

/// Serialized model: JSON document with full round-trip double precision.
/// load(save(x)) reproduces the parameters bit-exactly.
struct Checkpoint {
    int format_version = kCheckpointFormatVersion;
    MlpArchitecture architecture;
    MlpParameters parameters;
    CheckpointMetadata metadata;
};

enum class CheckpointErrorKind { Io, Malformed, VersionMismatch, ShapeMismatch };

class CheckpointError : public std::runtime_error {
public:
    CheckpointError(CheckpointErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}
    CheckpointErrorKind kind() const { return kind_; }

private:
    CheckpointErrorKind kind_;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Current time as an ISO 8601 UTC string.
std::string utc_timestamp();

}  // namespace enskd
