// Copyright 2026 The c4vqc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * JSON/CSV serialization: model checkpoints (bit-exact double round trips),
 * training history exports, dataset manifests, metrics reports and the
 * orbit-table debug dump. JSON keys are emitted in stable (sorted) order;
 * CSV follows RFC 4180 quoting.
 */

#pragma once

#include <optional>
#include <string>

// vendored single-header nlohmann/json
#include <json.hpp>

#include "c4vqc/circuits.hpp"
#include "c4vqc/hybrid.hpp"
#include "c4vqc/metrics.hpp"
#include "c4vqc/symmetry.hpp"
#include "c4vqc/training.hpp"

namespace c4vqc {

/// Shortest round-trip decimal form of a double (via std::to_chars).
std::string format_double(double v);

/// RFC 4180 field quoting: quotes fields containing comma, quote or newline.
std::string csv_escape(const std::string& field);

/// Writes via a temporary file in the same directory, then renames.
void write_text_atomic(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

nlohmann::json model_spec_to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& j);

nlohmann::json metrics_to_json(const MetricsReport& m);

/// Checkpoint: {"format_version":1, "model":{...}, "params":[...]} with an
/// optional "cnn" section for hybrid models.
struct Checkpoint {
    ModelSpec spec;
    ModelParams params;
    std::optional<CnnPipelineSpec> cnn_spec;
    std::vector<double> cnn_filters;
    std::vector<double> cnn_rescale_lo, cnn_rescale_hi;
    bool cnn_calibrated = false;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);
Checkpoint checkpoint_of(const ModelSpec& spec, const ModelParams& params);
Checkpoint checkpoint_of(const HybridModel& model);
HybridModel hybrid_from_checkpoint(const Checkpoint& ckpt);

nlohmann::json cnn_spec_to_json(const CnnPipelineSpec& spec);
CnnPipelineSpec cnn_spec_from_json(const nlohmann::json& j);

/// epoch, loss, then train/test accuracy, precision, recall, f1 columns.
std::string history_to_csv(const TrainHistory& history);
nlohmann::json history_to_json(const TrainHistory& history);

nlohmann::json orbit_table_to_json(const OrbitTable& table);

nlohmann::json landscape_to_json(const LandscapeStats& stats);

/// Dataset manifest: image file reference plus labels and provenance.
struct DatasetManifest {
    std::string raw_path;
    int side = 0;
    int channels = 1;
    std::vector<int> labels;
    std::vector<bool> augmented;
    nlohmann::json provenance; // generator settings, seeds
};

void save_manifest(const std::string& path, const DatasetManifest& manifest);
DatasetManifest load_manifest(const std::string& path);

} // namespace c4vqc
