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
 * Experiment configuration (one JSON document with dataset/model/
 * cnn_pipeline/train/sweep sections), dataset assembly, the architecture
 * comparison sweep and its CSV outputs. Seeds are always explicit in the
 * config; a fixed config reproduces byte-identical CSVs.
 */

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "c4vqc/data.hpp"
#include "c4vqc/serialization.hpp"
#include "c4vqc/training.hpp"

namespace c4vqc {

struct DatasetConfig {
    std::string source = "tetrominoes"; // tetrominoes | images | manifest
    // tetrominoes
    int n = 4;
    int upscale_factor = 1;
    double noise_sigma = 25.0;
    int noise_copies = 0;
    std::uint64_t noise_seed = 0;
    bool rotation_augment = false;
    // images
    std::string path;
    std::string format = "png"; // png | raw
    int target_side = 16;
    bool grayscale = true;
    // manifest
    std::string manifest_path;
    // split
    double split_ratio = 1.0 / 3.0;
    std::uint64_t split_seed = 0;
};

struct SweepConfig {
    std::vector<Architecture> architectures;
    std::vector<int> n_layers_values;
    std::vector<std::uint64_t> seeds;
    int workers = 1;
};

struct ExperimentConfig {
    DatasetConfig dataset;
    std::optional<ModelSpec> model;
    std::optional<CnnPipelineSpec> cnn;
    std::uint64_t cnn_seed = 0;
    TrainConfig train;
    std::optional<SweepConfig> sweep;
};

ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);

/// Builds the full (pre-split) dataset a config describes.
Dataset build_dataset(const DatasetConfig& cfg);
/// Seeded stratified split per the config's ratio.
std::pair<Dataset, Dataset> split_dataset(const DatasetConfig& cfg, const Dataset& d);
/// Angle-encoded features plus +-1 labels.
NumericDataset to_numeric(const Dataset& d);

struct RunRecord {
    ModelSpec spec;
    std::uint64_t seed = 0;
    std::string status = "ok"; // "ok" or the failure message
    double final_loss = 0.0;
    MetricsReport train_metrics;
    MetricsReport test_metrics;
    double wall_seconds = 0.0;
    TrainHistory history;
    ModelParams trained_params; // in-memory only, not serialized
};

nlohmann::json run_record_to_json(const RunRecord& r);
RunRecord run_record_from_json(const nlohmann::json& j);

/// One quantum-only training run over pre-split numeric data.
RunRecord run_training(const ModelSpec& spec, const NumericDataset& train_set, const NumericDataset& test_set,
                       TrainConfig config, std::uint64_t seed);

struct SweepResult {
    std::vector<RunRecord> records;
    std::string summary_csv; // mean metrics per (architecture, n_layers)
    std::string losses_csv;  // per-epoch mean/min/max loss envelope per curve
};

/// architectures x n_layers x seeds training runs over a shared split; run
/// failures are recorded per run without aborting the sweep.
SweepResult compare_architectures(const ExperimentConfig& cfg);

} // namespace c4vqc
