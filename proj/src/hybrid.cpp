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

#include "c4vqc/hybrid.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <string>

#include "c4vqc/errors.hpp"

namespace c4vqc {

HybridModel make_hybrid(const CnnPipelineSpec& cnn_spec, std::uint64_t cnn_seed, const ModelSpec& quantum_spec) {
    HybridModel model;
    model.cnn = CnnPipeline(cnn_spec, cnn_seed);
    model.quantum_spec = quantum_spec;
    model.plan = build_model(quantum_spec);
    if (model.cnn.feature_count() != model.plan.n_inputs) {
        throw ValidationError("hybrid: pipeline yields " + std::to_string(model.cnn.feature_count()) +
                              " features but the quantum register wants " + std::to_string(model.plan.n_inputs));
    }
    return model;
}

std::vector<double> hybrid_forward(const HybridModel& model, const Tensor4& x) {
    const auto fw = model.cnn.forward(x);
    CompiledCircuit circuit(model.plan.gates, model.plan.observable, model.plan.n_qubits);
    CompiledCircuit::Scratch scratch;
    std::vector<double> out(fw.features.size());
    for (std::size_t i = 0; i < fw.features.size(); ++i) {
        out[i] = circuit.forward(model.quantum_params.values, fw.features[i], scratch);
    }
    return out;
}

namespace {

std::vector<int> to_sign_labels(const std::vector<double>& y) {
    std::vector<int> out;
    out.reserve(y.size());
    for (double v : y) {
        out.push_back(v >= 0 ? 1 : -1);
    }
    return out;
}

} // namespace

HybridTrainResult train_hybrid(HybridModel& model, const Tensor4& x_train, const std::vector<double>& y_train,
                               const Tensor4* x_test, const std::vector<double>* y_test, const TrainConfig& config,
                               bool calibrate) {
    config.validate();
    if (x_train.n == 0 || static_cast<std::size_t>(x_train.n) != y_train.size()) {
        throw ValidationError("train_hybrid: empty batch or label length mismatch");
    }

    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> u(config.init_low, config.init_high);
    model.quantum_params.values.assign(static_cast<std::size_t>(model.plan.n_params), 0.0);
    for (auto& v : model.quantum_params.values) {
        v = u(rng);
    }

    CompiledCircuitF qf32(model.plan.gates, model.plan.observable, model.plan.n_qubits);
    CompiledCircuit qf64(model.plan.gates, model.plan.observable, model.plan.n_qubits);
    CompiledCircuitF::Scratch s32;
    CompiledCircuit::Scratch s64;

    const int n_cnn = model.cnn.parameter_count();
    const int n_q = model.plan.n_params;
    AdamState adam;
    HybridTrainResult result;

    const std::size_t batch = static_cast<std::size_t>(x_train.n);
    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto fw = model.cnn.forward(x_train);

        std::vector<double> outputs(batch);
        std::vector<double> qgrad(static_cast<std::size_t>(n_q), 0.0);
        std::vector<std::vector<double>> upstream(batch);
        const double scale = 2.0 / static_cast<double>(batch);
        for (std::size_t i = 0; i < batch; ++i) {
            ValueGrad vg;
            if (config.precision == Precision::Float32) {
                vg = qf32.gradient(model.quantum_params.values, fw.features[i], s32, true);
            } else {
                vg = qf64.gradient(model.quantum_params.values, fw.features[i], s64, true);
            }
            outputs[i] = vg.value;
            const double w = scale * (vg.value - y_train[i]);
            for (int s = 0; s < n_q; ++s) {
                qgrad[static_cast<std::size_t>(s)] += w * vg.d_params[static_cast<std::size_t>(s)];
            }
            upstream[i].resize(vg.d_inputs.size());
            for (std::size_t k = 0; k < vg.d_inputs.size(); ++k) {
                upstream[i][k] = w * vg.d_inputs[k];
            }
        }
        const auto bw = model.cnn.backward(fw, upstream);

        std::vector<double> params = model.cnn.flat_filters();
        params.insert(params.end(), model.quantum_params.values.begin(), model.quantum_params.values.end());
        std::vector<double> grads;
        grads.reserve(params.size());
        for (const auto& fg : bw.filter_grads) {
            grads.insert(grads.end(), fg.v.begin(), fg.v.end());
        }
        grads.insert(grads.end(), qgrad.begin(), qgrad.end());
        adam_step(adam, params, grads, config.learning_rate);
        model.cnn.set_flat_filters(std::vector<double>(params.begin(), params.begin() + n_cnn));
        model.quantum_params.values.assign(params.begin() + n_cnn, params.end());

        EpochRecord rec;
        rec.loss = mse_loss(outputs, y_train);
        if (!std::isfinite(rec.loss)) {
            throw NumericalError("hybrid training diverged: non-finite loss at epoch " + std::to_string(epoch));
        }
        rec.train_metrics = compute_metrics(classify(outputs), to_sign_labels(y_train));
        if (config.record_test_metrics && x_test != nullptr && y_test != nullptr) {
            const auto test_outputs = hybrid_forward(model, *x_test);
            rec.test_metrics = compute_metrics(classify(test_outputs), to_sign_labels(*y_test));
        }
        rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.history.epochs.push_back(std::move(rec));

        if (calibrate && epoch == 0 && !model.cnn.calibrated()) {
            model.cnn.calibrate_rescale(fw.final_tensor);
        }
    }
    return result;
}

} // namespace c4vqc
