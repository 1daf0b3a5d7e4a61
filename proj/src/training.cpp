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

#include "c4vqc/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "c4vqc/errors.hpp"

namespace c4vqc {

void NumericDataset::validate(int n_features) const {
    if (features.empty()) {
        throw ValidationError("dataset is empty");
    }
    if (features.size() != labels.size()) {
        throw ValidationError("dataset features/labels length mismatch");
    }
    for (const auto& f : features) {
        if (static_cast<int>(f.size()) != n_features) {
            throw ValidationError("dataset feature vector has wrong length");
        }
    }
}

void TrainConfig::validate() const {
    if (learning_rate <= 0.0) {
        throw ValidationError("TrainConfig: learning_rate must be > 0");
    }
    if (max_epochs < 1) {
        throw ValidationError("TrainConfig: max_epochs must be >= 1");
    }
    if (batch_size < 0) {
        throw ValidationError("TrainConfig: batch_size must be >= 0");
    }
}

double mse_loss(const std::vector<double>& predictions, const std::vector<double>& labels) {
    if (predictions.empty() || predictions.size() != labels.size()) {
        throw ValidationError("mse_loss: nonempty equal-length vectors required");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double d = predictions[i] - labels[i];
        s += d * d;
    }
    return s / static_cast<double>(predictions.size());
}

std::vector<double> loss_gradient(const CircuitPlan& plan, const ModelParams& params, const NumericDataset& batch) {
    batch.validate(plan.n_inputs);
    CompiledCircuit circuit(plan.gates, plan.observable, plan.n_qubits);
    CompiledCircuit::Scratch scratch;
    std::vector<double> grad(params.values.size(), 0.0);
    const double scale = 2.0 / static_cast<double>(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto vg = circuit.gradient(params.values, batch.features[i], scratch, false);
        const double w = scale * (vg.value - batch.labels[i]);
        for (std::size_t s = 0; s < grad.size(); ++s) {
            grad[s] += w * vg.d_params[s];
        }
    }
    return grad;
}

std::vector<double> parameter_shift_gradient(const CircuitPlan& plan, const ModelParams& params,
                                             const NumericDataset& batch) {
    batch.validate(plan.n_inputs);
    std::vector<double> grad(params.values.size(), 0.0);
    const double scale = 2.0 / static_cast<double>(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const double f = expectation_of_circuit(plan.gates, plan.observable, plan.n_qubits, params.values,
                                                batch.features[i]);
        const auto g =
            shift_rule_gradient(plan.gates, plan.observable, plan.n_qubits, params.values, batch.features[i], false);
        const double w = scale * (f - batch.labels[i]);
        for (std::size_t s = 0; s < grad.size(); ++s) {
            grad[s] += w * g.d_params[s];
        }
    }
    return grad;
}

void adam_step(AdamState& state, std::vector<double>& params, const std::vector<double>& grads, double lr) {
    if (state.first_moment.empty()) {
        state.first_moment.assign(params.size(), 0.0);
        state.second_moment.assign(params.size(), 0.0);
    }
    if (state.first_moment.size() != params.size() || grads.size() != params.size()) {
        throw ValidationError("adam_step: vector length mismatch");
    }
    state.step_count += 1;
    const double b1t = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
    const double b2t = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.first_moment[i] = state.beta1 * state.first_moment[i] + (1.0 - state.beta1) * g;
        state.second_moment[i] = state.beta2 * state.second_moment[i] + (1.0 - state.beta2) * g * g;
        const double mhat = state.first_moment[i] / b1t;
        const double vhat = state.second_moment[i] / b2t;
        params[i] -= lr * mhat / (std::sqrt(vhat) + state.epsilon);
    }
}

namespace {

struct BatchEval {
    std::vector<double> outputs;
    std::vector<double> grad; // already weighted by the MSE chain rule
};

template <typename Real>
BatchEval eval_batch(const CompiledCircuitT<Real>& circuit, typename CompiledCircuitT<Real>::Scratch& scratch,
                     const std::vector<double>& params, const NumericDataset& data,
                     const std::vector<std::size_t>& index) {
    BatchEval out;
    out.outputs.resize(index.size());
    out.grad.assign(params.size(), 0.0);
    const double scale = 2.0 / static_cast<double>(index.size());
    for (std::size_t k = 0; k < index.size(); ++k) {
        const std::size_t i = index[k];
        const auto vg = circuit.gradient(params, data.features[i], scratch, false);
        out.outputs[k] = vg.value;
        const double w = scale * (vg.value - data.labels[i]);
        for (std::size_t s = 0; s < params.size(); ++s) {
            out.grad[s] += w * vg.d_params[s];
        }
    }
    return out;
}

template <typename Real>
std::vector<double> eval_outputs(const CompiledCircuitT<Real>& circuit,
                                 typename CompiledCircuitT<Real>::Scratch& scratch, const std::vector<double>& params,
                                 const NumericDataset& data) {
    std::vector<double> outputs(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        outputs[i] = circuit.forward(params, data.features[i], scratch);
    }
    return outputs;
}

std::vector<int> labels_of(const NumericDataset& data, const std::vector<std::size_t>& index) {
    std::vector<int> labels;
    labels.reserve(index.size());
    for (std::size_t i : index) {
        labels.push_back(data.labels[i] >= 0 ? 1 : -1);
    }
    return labels;
}

template <typename Real>
TrainResult train_impl(const CircuitPlan& plan, const NumericDataset& train_set, const NumericDataset* test_set,
                       const TrainConfig& config) {
    config.validate();
    train_set.validate(plan.n_inputs);
    if (test_set != nullptr) {
        test_set->validate(plan.n_inputs);
    }

    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> u(config.init_low, config.init_high);
    TrainResult result;
    result.params.values.resize(static_cast<std::size_t>(plan.n_params));
    for (auto& v : result.params.values) {
        v = u(rng);
    }

    CompiledCircuitT<Real> circuit(plan.gates, plan.observable, plan.n_qubits);
    typename CompiledCircuitT<Real>::Scratch scratch;
    AdamState adam;

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t batch =
        config.batch_size == 0 ? train_set.size() : std::min<std::size_t>(train_set.size(), config.batch_size);

    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        EpochRecord rec;
        if (batch == train_set.size()) {
            const auto ev = eval_batch(circuit, scratch, result.params.values, train_set, order);
            rec.loss = mse_loss(ev.outputs, train_set.labels);
            rec.train_metrics = compute_metrics(classify(ev.outputs), labels_of(train_set, order));
            adam_step(adam, result.params.values, ev.grad, config.learning_rate);
        } else {
            std::shuffle(order.begin(), order.end(), rng);
            std::vector<double> epoch_outputs;
            std::vector<int> epoch_labels;
            std::vector<double> epoch_label_values;
            for (std::size_t at = 0; at < order.size(); at += batch) {
                const std::size_t hi = std::min(order.size(), at + batch);
                const std::vector<std::size_t> index(order.begin() + static_cast<std::ptrdiff_t>(at),
                                                     order.begin() + static_cast<std::ptrdiff_t>(hi));
                const auto ev = eval_batch(circuit, scratch, result.params.values, train_set, index);
                adam_step(adam, result.params.values, ev.grad, config.learning_rate);
                epoch_outputs.insert(epoch_outputs.end(), ev.outputs.begin(), ev.outputs.end());
                for (std::size_t i : index) {
                    epoch_labels.push_back(train_set.labels[i] >= 0 ? 1 : -1);
                    epoch_label_values.push_back(train_set.labels[i]);
                }
            }
            rec.loss = mse_loss(epoch_outputs, epoch_label_values);
            rec.train_metrics = compute_metrics(classify(epoch_outputs), epoch_labels);
        }
        if (!std::isfinite(rec.loss)) {
            throw NumericalError("training diverged: non-finite loss at epoch " + std::to_string(epoch));
        }
        if (config.record_test_metrics && test_set != nullptr) {
            const auto outputs = eval_outputs(circuit, scratch, result.params.values, *test_set);
            std::vector<int> lbl;
            for (double y : test_set->labels) {
                lbl.push_back(y >= 0 ? 1 : -1);
            }
            rec.test_metrics = compute_metrics(classify(outputs), lbl);
        }
        rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.history.epochs.push_back(std::move(rec));
    }
    return result;
}

} // namespace

TrainResult train(const CircuitPlan& plan, const NumericDataset& train_set, const NumericDataset* test_set,
                  const TrainConfig& config) {
    if (config.precision == Precision::Float32) {
        return train_impl<float>(plan, train_set, test_set, config);
    }
    return train_impl<double>(plan, train_set, test_set, config);
}

TrainResult train(const ModelSpec& spec, const NumericDataset& train_set, const NumericDataset* test_set,
                  const TrainConfig& config) {
    return train(build_model(spec), train_set, test_set, config);
}

std::vector<double> evaluate_outputs(const CircuitPlan& plan, const ModelParams& params, const NumericDataset& data) {
    data.validate(plan.n_inputs);
    CompiledCircuit circuit(plan.gates, plan.observable, plan.n_qubits);
    CompiledCircuit::Scratch scratch;
    return eval_outputs(circuit, scratch, params.values, data);
}

LandscapeStats landscape_stats(const ModelSpec& spec, const std::vector<double>& features, double label,
                               int n_samples, std::uint64_t seed) {
    if (n_samples < 2) {
        throw ValidationError("landscape_stats: n_samples must be >= 2");
    }
    const CircuitPlan plan = build_model(spec);
    if (static_cast<int>(features.size()) != plan.n_inputs) {
        throw ValidationError("landscape_stats: feature length mismatch");
    }
    CompiledCircuit circuit(plan.gates, plan.observable, plan.n_qubits);
    CompiledCircuit::Scratch scratch;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 6.283185307179586);

    double sum_l = 0.0, sum_l2 = 0.0, sum_g = 0.0, sum_g2 = 0.0;
    std::vector<double> params(static_cast<std::size_t>(plan.n_params));
    for (int s = 0; s < n_samples; ++s) {
        for (auto& p : params) {
            p = u(rng);
        }
        const auto vg = circuit.gradient(params, features, scratch, false);
        const double resid = vg.value - label;
        const double loss = resid * resid;
        const double dloss = 2.0 * resid * vg.d_params[0]; // slot 0 by convention
        sum_l += loss;
        sum_l2 += loss * loss;
        sum_g += dloss;
        sum_g2 += dloss * dloss;
    }
    const double n = static_cast<double>(n_samples);
    LandscapeStats out;
    out.n_samples = n_samples;
    out.mean_loss = sum_l / n;
    out.var_loss = (sum_l2 - n * out.mean_loss * out.mean_loss) / (n - 1.0);
    out.mean_grad = sum_g / n;
    out.var_grad = (sum_g2 - n * out.mean_grad * out.mean_grad) / (n - 1.0);
    return out;
}

} // namespace c4vqc
