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

#include "c4vqc/circuits.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "c4vqc/errors.hpp"

namespace c4vqc {

std::string architecture_name(Architecture a) {
    switch (a) {
    case Architecture::Equivariant:
        return "equivariant";
    case Architecture::NonEquivariant:
        return "non_equivariant";
    default:
        return "basic_entangler";
    }
}

Architecture architecture_from_name(const std::string& name) {
    if (name == "equivariant") {
        return Architecture::Equivariant;
    }
    if (name == "non_equivariant") {
        return Architecture::NonEquivariant;
    }
    if (name == "basic_entangler") {
        return Architecture::BasicEntangler;
    }
    throw ValidationError("unknown architecture '" + name + "'");
}

void ModelSpec::validate() const {
    // plans can be built (and their resources counted) at any n; the 24-qubit
    // capacity guard lives in the simulator
    if (n < 1) {
        throw ValidationError("ModelSpec: n must be >= 1");
    }
    if (n_layers < 1) {
        throw ValidationError("ModelSpec: n_layers must be >= 1");
    }
}

std::vector<GateOp> encoding_layer(int n) {
    std::vector<GateOp> gates;
    gates.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (int k = 0; k < n * n; ++k) {
        gates.push_back(GateOp::rx_input(k, k));
    }
    return gates;
}

namespace {

// Emits one twirl group: the CNOT (a -> b) and its three images under the
// table's rotation. Group members commute whenever a and b sit in different
// orbits (or share a control/target), so the product is order-free.
void emit_cnot_twirl(std::vector<GateOp>& gates, const OrbitTable& table, int control, int target) {
    int a = control;
    int b = target;
    for (int c = 0; c < 4; ++c) {
        if (a != b) {
            gates.push_back(GateOp::cnot(a, b));
        }
        a = table.rotate_qubit(a);
        b = table.rotate_qubit(b);
    }
}

} // namespace

std::vector<GateOp> equivariant_block(const OrbitTable& table, int param_slot_base) {
    std::vector<GateOp> gates;
    const int n_phi = table.n_orbits();
    for (int m = 0; m < n_phi; ++m) {
        const int s = param_slot_base + 3 * m;
        for (const auto& p : table.orbits[static_cast<std::size_t>(m)]) {
            const int q = qubit_of(p, table.n);
            gates.push_back(GateOp::rz_param(q, s));
            gates.push_back(GateOp::ry_param(q, s + 1));
            gates.push_back(GateOp::rz_param(q, s + 2));
        }
    }
    if (table.n * table.n < 2) {
        return gates; // single qubit: no entangler exists
    }
    // ring through the cell-0 representatives, replicated into every cell
    if (n_phi >= 2) {
        const auto& cell0 = table.cells[0];
        for (int m = 0; m < n_phi; ++m) {
            const int a = qubit_of(cell0[static_cast<std::size_t>(m)], table.n);
            const int b = qubit_of(cell0[static_cast<std::size_t>((m + 1) % n_phi)], table.n);
            emit_cnot_twirl(gates, table, a, b);
        }
    }
    // one symmetrized connector from cell 0 into cell 1; its target sits in
    // a different orbit than its control so the four images commute
    {
        const int a = qubit_of(table.cells[0][0], table.n);
        const std::size_t target_orbit = n_phi >= 2 ? 1 : 0;
        const int b = qubit_of(table.cells[1][target_orbit], table.n);
        emit_cnot_twirl(gates, table, a, b);
    }
    return gates;
}

OrbitTable build_random_orbit_table(int n, std::uint64_t seed) {
    const OrbitTable truth = compute_orbits(n);
    std::mt19937_64 rng(seed);

    std::vector<std::size_t> sizes;
    for (const auto& orbit : truth.orbits) {
        sizes.push_back(orbit.size());
    }
    std::sort(sizes.begin(), sizes.end(), std::greater<>());

    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<int> qubits(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
        std::iota(qubits.begin(), qubits.end(), 0);
        std::shuffle(qubits.begin(), qubits.end(), rng);

        std::vector<std::vector<int>> groups;
        std::size_t at = 0;
        for (std::size_t sz : sizes) {
            groups.emplace_back(qubits.begin() + static_cast<std::ptrdiff_t>(at),
                                qubits.begin() + static_cast<std::ptrdiff_t>(at + sz));
            at += sz;
        }
        std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
            return *std::min_element(a.begin(), a.end()) < *std::min_element(b.begin(), b.end());
        });

        OrbitTable table;
        table.n = n;
        table.orbit_of.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), -1);
        for (std::size_t g = 0; g < groups.size(); ++g) {
            std::vector<PixelIndex> orbit;
            for (int q : groups[g]) {
                orbit.push_back({q / n, q % n});
                table.orbit_of[static_cast<std::size_t>(q)] = static_cast<int>(g);
            }
            table.orbits.push_back(std::move(orbit));
        }
        const int n_cells = n == 1 ? 1 : 4;
        for (int c = 0; c < n_cells; ++c) {
            std::vector<PixelIndex> cell;
            for (const auto& orbit : table.orbits) {
                if (static_cast<std::size_t>(c) < orbit.size()) {
                    cell.push_back(orbit[static_cast<std::size_t>(c)]);
                }
            }
            table.cells.push_back(std::move(cell));
        }

        bool same_as_truth = true;
        for (int q = 0; q < n * n && same_as_truth; ++q) {
            same_as_truth = table.rotate_qubit(q) == truth.rotate_qubit(q);
        }
        if (!same_as_truth) {
            return table;
        }
        // accidental reproduction of the true orbit cycles: redraw
        if (n == 1) {
            return table; // one qubit admits a single partition
        }
    }
    throw ValidationError("build_random_orbit_table: could not draw a symmetry-breaking partition");
}

std::vector<GateOp> basic_entangler_block(int n, int param_slot_base, PauliAxis axis) {
    std::vector<GateOp> gates;
    const int nq = n * n;
    for (int q = 0; q < nq; ++q) {
        gates.push_back(GateOp::rotation_param(axis, q, param_slot_base + q));
    }
    if (nq >= 2) {
        for (int q = 0; q < nq; ++q) {
            gates.push_back(GateOp::cnot(q, (q + 1) % nq));
        }
    }
    return gates;
}

namespace {

ZSumObservable orbit_observable(const OrbitTable& table, int anchor_qubit) {
    const auto& orbit = table.orbits[static_cast<std::size_t>(table.orbit_of[static_cast<std::size_t>(anchor_qubit)])];
    ZSumObservable obs;
    const double coeff = 1.0 / static_cast<double>(orbit.size());
    for (const auto& p : orbit) {
        obs.terms.push_back({qubit_of(p, table.n), coeff});
    }
    return obs;
}

} // namespace

CircuitPlan build_model(const ModelSpec& spec) {
    spec.validate();
    CircuitPlan plan;
    plan.n_qubits = spec.n * spec.n;
    plan.n_inputs = plan.n_qubits;

    const OrbitTable truth = compute_orbits(spec.n);
    OrbitTable table = truth;
    if (spec.architecture == Architecture::NonEquivariant) {
        table = build_random_orbit_table(spec.n, spec.random_orbit_seed);
    }

    const int params_per_layer =
        spec.architecture == Architecture::BasicEntangler ? plan.n_qubits : 3 * table.n_orbits();

    for (int layer = 0; layer < spec.n_layers; ++layer) {
        auto enc = encoding_layer(spec.n);
        plan.gates.insert(plan.gates.end(), enc.begin(), enc.end());
        std::vector<GateOp> block;
        if (spec.architecture == Architecture::BasicEntangler) {
            block = basic_entangler_block(spec.n, layer * params_per_layer, spec.rotation_axis);
        } else {
            block = equivariant_block(table, layer * params_per_layer);
        }
        plan.gates.insert(plan.gates.end(), block.begin(), block.end());
    }

    plan.n_params = spec.n_layers * params_per_layer;
    plan.params_per_layer = params_per_layer;
    int cnots = 0;
    for (const auto& g : plan.gates) {
        cnots += g.kind == GateKind::CNOT ? 1 : 0;
    }
    plan.cnots_per_layer = cnots / spec.n_layers;

    if (spec.architecture == Architecture::NonEquivariant) {
        plan.observable = orbit_observable(table, 0);
    } else {
        plan.observable = orbit_observable(truth, 0);
    }
    return plan;
}

double model_forward(const CircuitPlan& plan, const ModelParams& params, const std::vector<double>& features) {
    if (static_cast<int>(params.values.size()) != plan.n_params) {
        throw ValidationError("model_forward: expected " + std::to_string(plan.n_params) + " parameters, got " +
                              std::to_string(params.values.size()));
    }
    if (static_cast<int>(features.size()) != plan.n_inputs) {
        throw ValidationError("model_forward: expected " + std::to_string(plan.n_inputs) + " features, got " +
                              std::to_string(features.size()));
    }
    CompiledCircuit circuit(plan.gates, plan.observable, plan.n_qubits);
    CompiledCircuit::Scratch scratch;
    return circuit.forward(params.values, features, scratch);
}

ModelParams init_params(const CircuitPlan& plan, std::uint64_t seed, double low, double high) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(low, high);
    ModelParams p;
    p.values.resize(static_cast<std::size_t>(plan.n_params));
    for (auto& v : p.values) {
        v = u(rng);
    }
    return p;
}

} // namespace c4vqc
