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
 * MSE loss, adjoint/shift loss gradients, Adam, the training loop and the
 * random-parameter landscape statistics.
 *
 * Labels are +1 ("T") and -1 ("L"). Parameters initialize uniformly from
 * [0, 2*pi) by default. Training runs full batch unless a batch size is
 * set, and is bit-deterministic for a fixed (plan, data, config).
 */

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "c4vqc/circuits.hpp"
#include "c4vqc/metrics.hpp"

namespace c4vqc {

/// Pre-scaled features (angles in [-pi, pi]) with +-1 labels.
struct NumericDataset {
    std::vector<std::vector<double>> features;
    std::vector<double> labels;

    std::size_t size() const { return features.size(); }
    void validate(int n_features) const;
};

enum class Precision { Float32, Float64 };

struct TrainConfig {
    double learning_rate = 0.1;
    int max_epochs = 100;
    int batch_size = 0; // 0 = full batch
    std::uint64_t seed = 0;
    double init_low = 0.0;
    double init_high = 6.283185307179586; // 2*pi
    bool record_test_metrics = false;
    // float32 amplitudes keep the long training loops fast; gradient noise
    // near 1e-6 is far below anything Adam can see. Oracles use Float64.
    Precision precision = Precision::Float32;

    void validate() const;
};

struct AdamState {
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    long step_count = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct EpochRecord {
    double loss = 0.0;
    MetricsReport train_metrics;
    std::optional<MetricsReport> test_metrics;
    double wall_seconds = 0.0;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
};

struct TrainResult {
    ModelParams params;
    TrainHistory history;
};

double mse_loss(const std::vector<double>& predictions, const std::vector<double>& labels);

/// dL/dtheta of the MSE loss over the batch via the adjoint backend (exact,
/// double precision). Shared slots accumulate over gate occurrences.
std::vector<double> loss_gradient(const CircuitPlan& plan, const ModelParams& params, const NumericDataset& batch);

/// Same through per-occurrence parameter shifts; the slow oracle.
std::vector<double> parameter_shift_gradient(const CircuitPlan& plan, const ModelParams& params,
                                             const NumericDataset& batch);

/// One Adam update with bias correction; modifies params and state.
void adam_step(AdamState& state, std::vector<double>& params, const std::vector<double>& grads, double lr);

TrainResult train(const CircuitPlan& plan, const NumericDataset& train_set, const NumericDataset* test_set,
                  const TrainConfig& config);
TrainResult train(const ModelSpec& spec, const NumericDataset& train_set, const NumericDataset* test_set,
                  const TrainConfig& config);

/// Model outputs over a dataset (double precision).
std::vector<double> evaluate_outputs(const CircuitPlan& plan, const ModelParams& params, const NumericDataset& data);

struct LandscapeStats {
    double mean_loss = 0.0;
    double var_loss = 0.0;
    double mean_grad = 0.0;
    double var_grad = 0.0;
    int n_samples = 0;
};

/// Single-point loss and d(loss)/d(theta_0) statistics over parameter draws
/// uniform in [0, 2*pi). Sample variance is the unbiased estimator.
LandscapeStats landscape_stats(const ModelSpec& spec, const std::vector<double>& features, double label,
                               int n_samples, std::uint64_t seed);

} // namespace c4vqc
