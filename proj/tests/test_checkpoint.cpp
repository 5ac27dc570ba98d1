// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include <fstream>
#include <string>

#include <json.hpp>

#include "enskd/checkpoint.hpp"

#include "temp_dir.hpp"

using namespace enskd;
using testutil::TempDir;

namespace {

Checkpoint sample_checkpoint(std::uint64_t seed = 11) {
    Checkpoint c;
    c.architecture.input_dim = 3;
    c.architecture.hidden_dims = {5, 4};
    c.architecture.num_classes = 3;
    c.parameters = init_parameters(c.architecture, seed);
    c.metadata = {seed, 30, 0.123456789123456789, utc_timestamp()};
    return c;
}

bool params_identical(const MlpParameters& a, const MlpParameters& b) {
    if (!a.shape_congruent(b)) return false;
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        if (a.layers[l].weights != b.layers[l].weights) return false;
        if (a.layers[l].bias != b.layers[l].bias) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("checkpoint: save/load round-trip is bit-exact") {
    TempDir dir("ckpt");
    const Checkpoint c = sample_checkpoint();
    save_checkpoint(dir.path() / "m.json", c);
    const Checkpoint loaded = load_checkpoint(dir.path() / "m.json");
    CHECK(params_identical(c.parameters, loaded.parameters));
    CHECK(loaded.architecture == c.architecture);
    CHECK(loaded.metadata.seed == c.metadata.seed);
    CHECK(loaded.metadata.epochs == c.metadata.epochs);
    CHECK(loaded.metadata.final_train_loss == c.metadata.final_train_loss);
    CHECK(loaded.metadata.created_at == c.metadata.created_at);
}

TEST_CASE("checkpoint: future format version rejected") {
    TempDir dir("ckpt");
    const Checkpoint c = sample_checkpoint();
    save_checkpoint(dir.path() / "m.json", c);
    auto j = nlohmann::json::parse(std::ifstream(dir.path() / "m.json"));
    j["format_version"] = kCheckpointFormatVersion + 1;
    std::ofstream(dir.path() / "m.json") << j.dump();
    try {
        load_checkpoint(dir.path() / "m.json");
        FAIL("expected CheckpointError");
    } catch (const CheckpointError& e) {
        CHECK(e.kind() == CheckpointErrorKind::VersionMismatch);
    }
}

TEST_CASE("checkpoint: truncated parameter array names the layer") {
    TempDir dir("ckpt");
    const Checkpoint c = sample_checkpoint();
    save_checkpoint(dir.path() / "m.json", c);
    auto j = nlohmann::json::parse(std::ifstream(dir.path() / "m.json"));
    j["parameters"][1]["weights"][0].erase(0);  // drop one weight from layer 1, row 0
    std::ofstream(dir.path() / "m.json") << j.dump();
    try {
        load_checkpoint(dir.path() / "m.json");
        FAIL("expected CheckpointError");
    } catch (const CheckpointError& e) {
        CHECK(e.kind() == CheckpointErrorKind::ShapeMismatch);
        CHECK(std::string(e.what()).find("layer 1") != std::string::npos);
    }
}

TEST_CASE("checkpoint: malformed document and missing file are distinct errors") {
    TempDir dir("ckpt");
    std::ofstream(dir.path() / "bad.json") << "{ not json";
    try {
        load_checkpoint(dir.path() / "bad.json");
        FAIL("expected CheckpointError");
    } catch (const CheckpointError& e) {
        CHECK(e.kind() == CheckpointErrorKind::Malformed);
    }
    try {
        load_checkpoint(dir.path() / "absent.json");
        FAIL("expected CheckpointError");
    } catch (const CheckpointError& e) {
        CHECK(e.kind() == CheckpointErrorKind::Io);
    }
}

TEST_CASE("checkpoint: missing metadata field is malformed") {
    TempDir dir("ckpt");
    const Checkpoint c = sample_checkpoint();
    save_checkpoint(dir.path() / "m.json", c);
    auto j = nlohmann::json::parse(std::ifstream(dir.path() / "m.json"));
    j["metadata"].erase("seed");
    std::ofstream(dir.path() / "m.json") << j.dump();
    try {
        load_checkpoint(dir.path() / "m.json");
        FAIL("expected CheckpointError");
    } catch (const CheckpointError& e) {
        CHECK(e.kind() == CheckpointErrorKind::Malformed);
    }
}
