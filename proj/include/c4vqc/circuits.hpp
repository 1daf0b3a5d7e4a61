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
 * Builders for the three benchmark architectures as data re-uploading
 * circuits over an n x n pixel register.
 *
 * Equivariant: per orbit, one general rotation RZ RY RZ with the three
 * angles shared by every orbit member; CNOTs are emitted as whole twirl
 * groups (a ring through the cell-0 representatives replicated into every
 * cell, plus one cell-0-to-cell-1 connector whose endpoints sit in
 * different orbits so the four conjugates commute). Non-equivariant: the
 * same construction driven by a seeded random partition with the true
 * orbit-size multiset. Basic entangler: one single-axis rotation per qubit
 * and a closed CNOT ring.
 */

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "c4vqc/compiled.hpp"
#include "c4vqc/statevector.hpp"
#include "c4vqc/symmetry.hpp"

namespace c4vqc {

enum class Architecture { Equivariant, NonEquivariant, BasicEntangler };

std::string architecture_name(Architecture a);
Architecture architecture_from_name(const std::string& name);

struct ModelSpec {
    Architecture architecture = Architecture::Equivariant;
    int n = 4;          // image resolution; the register has n*n qubits
    int n_layers = 1;   // re-uploading layers
    std::uint64_t random_orbit_seed = 0; // NonEquivariant only
    PauliAxis rotation_axis = PauliAxis::X; // BasicEntangler only

    void validate() const;
};

struct ModelParams {
    std::vector<double> values;
};

struct CircuitPlan {
    int n_qubits = 0;
    std::vector<GateOp> gates;
    ZSumObservable observable;
    int n_params = 0;
    int n_inputs = 0;
    int params_per_layer = 0;
    int cnots_per_layer = 0;
};

/// One RX per qubit reading input slot k(i,j) = i*n + j.
std::vector<GateOp> encoding_layer(int n);

/// Variational block over a (true or randomized) orbit table; parameter
/// slots [base, base + 3*n_orbits).
std::vector<GateOp> equivariant_block(const OrbitTable& table, int param_slot_base);

/// Seeded random partition with the true orbit-size multiset; drives
/// equivariant_block to produce the symmetry-broken twin architecture.
OrbitTable build_random_orbit_table(int n, std::uint64_t seed);

/// Single-axis rotation per qubit (slots base..base+n*n) then the closed
/// CNOT ring q -> q+1 mod n*n.
std::vector<GateOp> basic_entangler_block(int n, int param_slot_base, PauliAxis axis);

/// Full re-uploading plan: n_layers x (encoding, block) plus the corner
/// orbit Z-sum observable (the randomized group holding qubit 0 for the
/// NonEquivariant model).
CircuitPlan build_model(const ModelSpec& spec);

/// Convenience single evaluation; compiles on the fly. Hot paths should
/// construct a CompiledCircuit once and reuse it.
double model_forward(const CircuitPlan& plan, const ModelParams& params, const std::vector<double>& features);

/// Uniform [low, high) parameter draw of the plan's parameter count.
ModelParams init_params(const CircuitPlan& plan, std::uint64_t seed, double low, double high);

} // namespace c4vqc
