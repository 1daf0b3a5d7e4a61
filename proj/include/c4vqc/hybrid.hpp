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
 * Classical equivariant convolution front-end feeding the quantum
 * classifier, trained jointly with Adam: quantum input gradients flow
 * through the rescale map into the pipeline's analytic backward pass.
 */

#pragma once

#include "c4vqc/cnn.hpp"
#include "c4vqc/training.hpp"

namespace c4vqc {

struct HybridModel {
    CnnPipeline cnn;
    ModelSpec quantum_spec;
    CircuitPlan plan;
    ModelParams quantum_params;
};

/// Builds the pipeline (seeded filters) and the quantum plan; the pipeline's
/// feature count must equal the quantum register size.
HybridModel make_hybrid(const CnnPipelineSpec& cnn_spec, std::uint64_t cnn_seed, const ModelSpec& quantum_spec);

/// Batch outputs f(x) in [-1, 1].
std::vector<double> hybrid_forward(const HybridModel& model, const Tensor4& x);

struct HybridTrainResult {
    TrainHistory history;
};

/// Joint full-batch (or mini-batch) Adam over [filters; quantum params].
/// When `calibrate` is set, per-feature rescale ranges are frozen from the
/// first epoch's activations (orbit-tied).
HybridTrainResult train_hybrid(HybridModel& model, const Tensor4& x_train, const std::vector<double>& y_train,
                               const Tensor4* x_test, const std::vector<double>* y_test, const TrainConfig& config,
                               bool calibrate = true);

} // namespace c4vqc
