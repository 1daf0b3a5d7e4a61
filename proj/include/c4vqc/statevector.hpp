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
 * Dense statevector simulation of the {RX, RY, RZ, CNOT, SWAP} gate set,
 * Z-sum expectation values, qubit permutations and two exact differentiation
 * backends (adjoint reverse sweep and the parameter-shift rule).
 *
 * Amplitude layout: qubit 0 is the most significant bit of the basis index,
 * i.e. |q0 q1 ... q_{n-1}> has index sum_q q_bit << (n-1-q). Rotation gates
 * follow the half-angle convention R_P(theta) = exp(-i * theta * P / 2).
 */

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace c4vqc {

using cplx = std::complex<double>;

enum class GateKind : std::uint8_t { RX, RY, RZ, CNOT, SWAP };

enum class SlotKind : std::uint8_t {
    None,  ///< angle bound directly (or gate has no angle)
    Param, ///< angle read from the trainable parameter vector
    Input, ///< angle read from the input feature vector
};

enum class PauliAxis : std::uint8_t { X, Y, Z };

/// One circuit instruction. Rotation gates carry either a bound angle or a
/// slot into a parameter/input vector; CNOT/SWAP carry two qubit indices.
struct GateOp {
    GateKind kind;
    int q0 = 0;
    int q1 = -1; // second qubit for CNOT (target) / SWAP
    double angle = 0.0;
    SlotKind slot_kind = SlotKind::None;
    int slot = -1;

    static GateOp rx(int q, double angle);
    static GateOp ry(int q, double angle);
    static GateOp rz(int q, double angle);
    static GateOp rx_param(int q, int slot);
    static GateOp ry_param(int q, int slot);
    static GateOp rz_param(int q, int slot);
    static GateOp rx_input(int q, int slot);
    static GateOp rotation(PauliAxis axis, int q, double angle);
    static GateOp rotation_param(PauliAxis axis, int q, int slot);
    static GateOp cnot(int control, int target);
    static GateOp swap(int a, int b);

    bool is_rotation() const { return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ; }
};

/// Observable of the form sum_k c_k * Z_{q_k} with distinct qubits.
struct ZSumObservable {
    std::vector<std::pair<int, double>> terms;

    double max_abs() const; // sum of |c_k|, the output bound
    void validate(int n_qubits) const;
};

class StateVector {
  public:
    /// |0...0> on n_qubits. Throws ValidationError outside 1..24 qubits.
    explicit StateVector(int n_qubits);

    int n_qubits() const { return n_qubits_; }
    std::size_t size() const { return amps_.size(); }
    const std::vector<cplx>& amplitudes() const { return amps_; }
    std::vector<cplx>& amplitudes() { return amps_; }

    void reset_zero();

    /// Applies one gate in place. Rotation gates must carry a bound angle
    /// (slot_kind None); use bind() or the compiled executor for slotted plans.
    void apply(const GateOp& gate);

    /// Convenience: applies gates front to back.
    void apply_all(const std::vector<GateOp>& gates);

    /// <psi| sum c_k Z_{q_k} |psi>
    double expectation(const ZSumObservable& obs) const;

    /// Relabels qubits: the state held by qubit q moves to qubit perm[q].
    /// Equivalent to applying the SWAP decomposition of perm; implemented as
    /// a single O(2^n) basis-index remap. Throws on non-bijective maps.
    void permute_qubits(const std::vector<int>& perm);

    double norm() const;

  private:
    int n_qubits_;
    std::vector<cplx> amps_;
};

/// Returns a copy of `gates` with every slotted angle replaced by its value
/// from `params` / `inputs`. Throws ValidationError on out-of-range slots.
std::vector<GateOp> bind_angles(const std::vector<GateOp>& gates, const std::vector<double>& params,
                                const std::vector<double>& inputs);

/// Number of distinct Param (resp. Input) slots required by a gate list,
/// computed as 1 + max slot index; 0 when none are referenced.
int param_slot_count(const std::vector<GateOp>& gates);
int input_slot_count(const std::vector<GateOp>& gates);

namespace kernels {
// In-place primitives on a raw amplitude array of 2^n entries. `q` is the
// qubit index under the MSB-first layout above.
void apply_rx(std::vector<cplx>& a, int n, int q, double angle);
void apply_ry(std::vector<cplx>& a, int n, int q, double angle);
void apply_rz(std::vector<cplx>& a, int n, int q, double angle);
void apply_cnot(std::vector<cplx>& a, int n, int control, int target);
void apply_swap(std::vector<cplx>& a, int n, int qa, int qb);
void apply_matrix1q(std::vector<cplx>& a, int n, int q, const cplx m[4]);
void apply_pauli(std::vector<cplx>& a, int n, int q, PauliAxis axis);
// <bra| (|s><t|)_q |ket> for s,t in {0,1}; out is row-major 2x2.
void transition_matrix1q(const std::vector<cplx>& bra, const std::vector<cplx>& ket, int n, int q, cplx out[4]);
} // namespace kernels

/// 2x2 matrix of the bound rotation gate (identity for CNOT/SWAP callers' misuse is rejected).
void rotation_matrix(GateKind kind, double angle, cplx out[4]);

struct GradientResult {
    std::vector<double> d_params;
    std::vector<double> d_inputs;
};

/// Exact d<O>/d(params) and d<O>/d(inputs) of the circuit run on |0...0>,
/// via one forward and one reverse sweep. Slots shared by several gates
/// accumulate their per-occurrence contributions.
GradientResult adjoint_gradient(const std::vector<GateOp>& gates, const ZSumObservable& obs, int n_qubits,
                                const std::vector<double>& params, const std::vector<double>& inputs,
                                bool want_input_grads = true);

/// Same quantities through the two-term parameter-shift rule, shifting each
/// gate occurrence by +-pi/2 separately and summing. Exact for this gate set;
/// kept as the slow independent oracle for adjoint_gradient.
GradientResult shift_rule_gradient(const std::vector<GateOp>& gates, const ZSumObservable& obs, int n_qubits,
                                   const std::vector<double>& params, const std::vector<double>& inputs,
                                   bool want_input_grads = true);

/// <O> after running the (slotted) gate list on |0...0>. Reference path; the
/// compiled executor in compiled.hpp is the fast equivalent.
double expectation_of_circuit(const std::vector<GateOp>& gates, const ZSumObservable& obs, int n_qubits,
                              const std::vector<double>& params, const std::vector<double>& inputs);

} // namespace c4vqc
