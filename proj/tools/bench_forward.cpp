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

// Micro-benchmark for the compiled executor: forward and adjoint gradient
// timings for a 16-qubit re-uploading circuit shaped like the n=4 models.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "c4vqc/compiled.hpp"

using namespace c4vqc;

int main(int argc, char** argv) {
    const int n_qubits = 16;
    const int n_layers = argc > 1 ? std::atoi(argv[1]) : 10;
    const int reps = argc > 2 ? std::atoi(argv[2]) : 20;

    // Layer: RX(input) per qubit, RZ RY RZ per qubit (params tied in groups
    // of 4 qubits, 12 slots/layer like the equivariant n=4 block), 20 CNOTs.
    std::vector<GateOp> gates;
    for (int l = 0; l < n_layers; ++l) {
        for (int q = 0; q < n_qubits; ++q) {
            gates.push_back(GateOp::rx_input(q, q));
        }
        const int base = 12 * l;
        for (int q = 0; q < n_qubits; ++q) {
            const int orbit = q % 4;
            gates.push_back(GateOp::rz_param(q, base + 3 * orbit));
            gates.push_back(GateOp::ry_param(q, base + 3 * orbit + 1));
            gates.push_back(GateOp::rz_param(q, base + 3 * orbit + 2));
        }
        for (int k = 0; k < 20; ++k) {
            gates.push_back(GateOp::cnot(k % 16, (k + 5) % 16));
        }
    }
    ZSumObservable obs{{{0, 0.25}, {3, 0.25}, {12, 0.25}, {15, 0.25}}};
    CompiledCircuit circuit(gates, obs, n_qubits);

    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.0, 6.28318530717958648);
    std::vector<double> params(static_cast<std::size_t>(circuit.n_params()));
    std::vector<double> inputs(16);
    for (auto& p : params) {
        p = u(rng);
    }
    for (auto& x : inputs) {
        x = u(rng) - 3.14159;
    }

    CompiledCircuit::Scratch scratch;
    double sink = 0.0;

    auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) {
        sink += circuit.forward(params, inputs, scratch);
    }
    auto t1 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) {
        auto g = circuit.gradient(params, inputs, scratch, false);
        sink += g.value + g.d_params[0];
    }
    auto t2 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) {
        auto g = circuit.gradient(params, inputs, scratch, true);
        sink += g.value + g.d_inputs[0];
    }
    auto t3 = std::chrono::steady_clock::now();

    auto ms = [](auto a, auto b) {
        return std::chrono::duration<double, std::milli>(b - a).count();
    };
    std::printf("layers=%d reps=%d\n", n_layers, reps);
    std::printf("forward:              %8.3f ms/call\n", ms(t0, t1) / reps);
    std::printf("gradient (params):    %8.3f ms/call\n", ms(t1, t2) / reps);
    std::printf("gradient (+inputs):   %8.3f ms/call\n", ms(t2, t3) / reps);
    std::printf("sink=%g\n", sink);
    return 0;
}
