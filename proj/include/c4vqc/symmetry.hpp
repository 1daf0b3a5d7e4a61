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
 * C4 geometry for square pixel grids: the 90-degree index map, orbits and
 * unit cells, the qubit-permutation representation of image rotation, Pauli
 * twirling and numeric equivariance checks.
 *
 * Conventions. A 90-degree rotation writes pixel (n-1-j, i) into slot (i,j);
 * rotate_index returns that source pixel. Qubit k(i,j) = i*n + j carries
 * pixel (i,j). The Hilbert-space representative U_g moves the state of
 * qubit (r,c) to qubit (c, n-1-r), which is what makes encoding first and
 * rotating the image equal to rotating the encoded state.
 */

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "c4vqc/statevector.hpp"

namespace c4vqc {

struct PixelIndex {
    int i = 0;
    int j = 0;

    bool operator==(const PixelIndex&) const = default;
};

inline int qubit_of(PixelIndex p, int n) { return p.i * n + p.j; }

/// Source pixel whose value lands at p after one 90-degree rotation.
PixelIndex rotate_index(PixelIndex p, int n);

/// Rotates a row-major n*n grid `times` quarter turns: x'[i][j] = x[n-1-j][i]
/// applied `times` times (times taken mod 4).
std::vector<double> rotate_image(const std::vector<double>& x, int n, int times);

/// Orbits and unit cells of the C4 action on an n*n grid. `orbits[m]` lists
/// members in rotation order starting from the lexicographically smallest;
/// `cells[c]` holds one representative per orbit, cell c+1 being the
/// rotate_index image of cell c. For odd n the center pixel forms a size-1
/// orbit listed only in cell 0.
struct OrbitTable {
    int n = 0;
    std::vector<std::vector<PixelIndex>> orbits;
    std::vector<int> orbit_of; // indexed by qubit k = i*n + j
    std::vector<std::vector<PixelIndex>> cells;

    int n_orbits() const { return static_cast<int>(orbits.size()); }
    /// Next member along the rotation cycle of q's orbit (q itself for the
    /// odd-n center). This is the table-level analogue of rotate_index and
    /// the only rotation the circuit builders use, so a table with scrambled
    /// orbits induces the matching scrambled "rotation".
    int rotate_qubit(int q) const;
};

OrbitTable compute_orbits(int n);

/// The four qubit permutations {I, U_g, U_g^2, U_g^3}; perm[q] is where the
/// state of qubit q moves.
struct GroupRep {
    int n_qubits = 0;
    std::array<std::vector<int>, 4> perms; // index = group power

    const std::vector<int>& element(int power) const { return perms[static_cast<std::size_t>(power & 3)]; }
};

GroupRep build_group_rep(int n);

struct PauliTerm {
    PauliAxis axis;
    int qubit;
    double weight;
};

/// Twirl of a single-qubit Pauli over the C4 rep: one term per orbit member,
/// weight 1/4 (weight 1 for the odd-n center, where all conjugates coincide).
std::vector<PauliTerm> twirl_pauli(PauliAxis axis, int qubit, const OrbitTable& table);

struct EquivarianceReport {
    bool equivariant = false;
    double max_deviation = 0.0;
};

/// Checks || U_g W |psi> - W U_g |psi> || over random states for every group
/// element. `gates` must carry bound angles.
EquivarianceReport verify_equivariance(const std::vector<GateOp>& gates, const GroupRep& rep, int n_states = 4,
                                       std::uint64_t seed = 7, double tol = 1e-10);

} // namespace c4vqc
