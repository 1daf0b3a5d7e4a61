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

#include "c4vqc/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "c4vqc/errors.hpp"

namespace c4vqc {

namespace {

constexpr int kMaxQubits = 24; // desk-scale memory guard

inline std::size_t bit_of(int n, int q) { return std::size_t{1} << (n - 1 - q); }

void check_qubit(int n, int q) {
    if (q < 0 || q >= n) {
        throw ValidationError("qubit index " + std::to_string(q) + " out of range for " + std::to_string(n) +
                              " qubits");
    }
}

void check_gate(const GateOp& g, int n) {
    check_qubit(n, g.q0);
    if (g.kind == GateKind::CNOT || g.kind == GateKind::SWAP) {
        check_qubit(n, g.q1);
        if (g.q0 == g.q1) {
            throw ValidationError("two-qubit gate requires distinct qubits");
        }
    }
}

} // namespace

GateOp GateOp::rx(int q, double angle) { return {GateKind::RX, q, -1, angle, SlotKind::None, -1}; }
GateOp GateOp::ry(int q, double angle) { return {GateKind::RY, q, -1, angle, SlotKind::None, -1}; }
GateOp GateOp::rz(int q, double angle) { return {GateKind::RZ, q, -1, angle, SlotKind::None, -1}; }
GateOp GateOp::rx_param(int q, int slot) { return {GateKind::RX, q, -1, 0.0, SlotKind::Param, slot}; }
GateOp GateOp::ry_param(int q, int slot) { return {GateKind::RY, q, -1, 0.0, SlotKind::Param, slot}; }
GateOp GateOp::rz_param(int q, int slot) { return {GateKind::RZ, q, -1, 0.0, SlotKind::Param, slot}; }
GateOp GateOp::rx_input(int q, int slot) { return {GateKind::RX, q, -1, 0.0, SlotKind::Input, slot}; }
GateOp GateOp::cnot(int control, int target) { return {GateKind::CNOT, control, target, 0.0, SlotKind::None, -1}; }
GateOp GateOp::swap(int a, int b) { return {GateKind::SWAP, a, b, 0.0, SlotKind::None, -1}; }

GateOp GateOp::rotation(PauliAxis axis, int q, double angle) {
    switch (axis) {
    case PauliAxis::X:
        return rx(q, angle);
    case PauliAxis::Y:
        return ry(q, angle);
    default:
        return rz(q, angle);
    }
}

GateOp GateOp::rotation_param(PauliAxis axis, int q, int slot) {
    switch (axis) {
    case PauliAxis::X:
        return rx_param(q, slot);
    case PauliAxis::Y:
        return ry_param(q, slot);
    default:
        return rz_param(q, slot);
    }
}

double ZSumObservable::max_abs() const {
    double s = 0.0;
    for (const auto& [q, c] : terms) {
        (void)q;
        s += std::abs(c);
    }
    return s;
}

void ZSumObservable::validate(int n_qubits) const {
    std::vector<bool> seen(static_cast<std::size_t>(n_qubits), false);
    for (const auto& [q, c] : terms) {
        (void)c;
        check_qubit(n_qubits, q);
        if (seen[static_cast<std::size_t>(q)]) {
            throw ValidationError("observable qubits must be distinct");
        }
        seen[static_cast<std::size_t>(q)] = true;
    }
}

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw ValidationError("n_qubits must lie in [1, " + std::to_string(kMaxQubits) + "], got " +
                              std::to_string(n_qubits));
    }
    amps_.assign(std::size_t{1} << n_qubits, cplx{0.0, 0.0});
    amps_[0] = cplx{1.0, 0.0};
}

void StateVector::reset_zero() {
    std::fill(amps_.begin(), amps_.end(), cplx{0.0, 0.0});
    amps_[0] = cplx{1.0, 0.0};
}

namespace kernels {

void apply_matrix1q(std::vector<cplx>& a, int n, int q, const cplx m[4]) {
    const std::size_t stride = bit_of(n, q);
    const std::size_t size = a.size();
    const cplx m00 = m[0], m01 = m[1], m10 = m[2], m11 = m[3];
    cplx* p = a.data();
    for (std::size_t base = 0; base < size; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const cplx a0 = p[i];
            const cplx a1 = p[i + stride];
            p[i] = m00 * a0 + m01 * a1;
            p[i + stride] = m10 * a0 + m11 * a1;
        }
    }
}

void apply_rx(std::vector<cplx>& a, int n, int q, double angle) {
    const double c = std::cos(0.5 * angle);
    const double s = std::sin(0.5 * angle);
    const std::size_t stride = bit_of(n, q);
    const std::size_t size = a.size();
    cplx* p = a.data();
    for (std::size_t base = 0; base < size; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const cplx a0 = p[i];
            const cplx a1 = p[i + stride];
            // [[c, -is], [-is, c]]
            p[i] = cplx{c * a0.real() + s * a1.imag(), c * a0.imag() - s * a1.real()};
            p[i + stride] = cplx{s * a0.imag() + c * a1.real(), -s * a0.real() + c * a1.imag()};
        }
    }
}

void apply_ry(std::vector<cplx>& a, int n, int q, double angle) {
    const double c = std::cos(0.5 * angle);
    const double s = std::sin(0.5 * angle);
    const std::size_t stride = bit_of(n, q);
    const std::size_t size = a.size();
    cplx* p = a.data();
    for (std::size_t base = 0; base < size; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const cplx a0 = p[i];
            const cplx a1 = p[i + stride];
            p[i] = c * a0 - s * a1;
            p[i + stride] = s * a0 + c * a1;
        }
    }
}

void apply_rz(std::vector<cplx>& a, int n, int q, double angle) {
    const double c = std::cos(0.5 * angle);
    const double s = std::sin(0.5 * angle);
    const cplx e0{c, -s}, e1{c, s};
    const std::size_t stride = bit_of(n, q);
    const std::size_t size = a.size();
    cplx* p = a.data();
    for (std::size_t base = 0; base < size; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            p[i] *= e0;
            p[i + stride] *= e1;
        }
    }
}

void apply_cnot(std::vector<cplx>& a, int n, int control, int target) {
    const std::size_t cbit = bit_of(n, control);
    const std::size_t tbit = bit_of(n, target);
    const std::size_t size = a.size();
    cplx* p = a.data();
    for (std::size_t i = 0; i < size; ++i) {
        if ((i & cbit) && !(i & tbit)) {
            std::swap(p[i], p[i | tbit]);
        }
    }
}

void apply_swap(std::vector<cplx>& a, int n, int qa, int qb) {
    const std::size_t abit = bit_of(n, qa);
    const std::size_t bbit = bit_of(n, qb);
    const std::size_t size = a.size();
    cplx* p = a.data();
    for (std::size_t i = 0; i < size; ++i) {
        if ((i & abit) && !(i & bbit)) {
            std::swap(p[i], p[(i & ~abit) | bbit]);
        }
    }
}

void apply_pauli(std::vector<cplx>& a, int n, int q, PauliAxis axis) {
    const std::size_t stride = bit_of(n, q);
    const std::size_t size = a.size();
    cplx* p = a.data();
    switch (axis) {
    case PauliAxis::X:
        for (std::size_t base = 0; base < size; base += 2 * stride) {
            for (std::size_t i = base; i < base + stride; ++i) {
                std::swap(p[i], p[i + stride]);
            }
        }
        break;
    case PauliAxis::Y:
        for (std::size_t base = 0; base < size; base += 2 * stride) {
            for (std::size_t i = base; i < base + stride; ++i) {
                const cplx a0 = p[i];
                const cplx a1 = p[i + stride];
                p[i] = cplx{a1.imag(), -a1.real()};      // -i * a1
                p[i + stride] = cplx{-a0.imag(), a0.real()}; // +i * a0
            }
        }
        break;
    case PauliAxis::Z:
        for (std::size_t base = 0; base < size; base += 2 * stride) {
            for (std::size_t i = base; i < base + stride; ++i) {
                p[i + stride] = -p[i + stride];
            }
        }
        break;
    }
}

void transition_matrix1q(const std::vector<cplx>& bra, const std::vector<cplx>& ket, int n, int q, cplx out[4]) {
    const std::size_t stride = bit_of(n, q);
    const std::size_t size = ket.size();
    const cplx* b = bra.data();
    const cplx* k = ket.data();
    cplx t00{}, t01{}, t10{}, t11{};
    for (std::size_t base = 0; base < size; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const cplx b0 = std::conj(b[i]);
            const cplx b1 = std::conj(b[i + stride]);
            const cplx k0 = k[i];
            const cplx k1 = k[i + stride];
            t00 += b0 * k0;
            t01 += b0 * k1;
            t10 += b1 * k0;
            t11 += b1 * k1;
        }
    }
    out[0] = t00;
    out[1] = t01;
    out[2] = t10;
    out[3] = t11;
}

} // namespace kernels

void rotation_matrix(GateKind kind, double angle, cplx out[4]) {
    const double c = std::cos(0.5 * angle);
    const double s = std::sin(0.5 * angle);
    switch (kind) {
    case GateKind::RX:
        out[0] = cplx{c, 0};
        out[1] = cplx{0, -s};
        out[2] = cplx{0, -s};
        out[3] = cplx{c, 0};
        return;
    case GateKind::RY:
        out[0] = cplx{c, 0};
        out[1] = cplx{-s, 0};
        out[2] = cplx{s, 0};
        out[3] = cplx{c, 0};
        return;
    case GateKind::RZ:
        out[0] = cplx{c, -s};
        out[1] = cplx{0, 0};
        out[2] = cplx{0, 0};
        out[3] = cplx{c, s};
        return;
    default:
        throw ValidationError("rotation_matrix: gate has no angle");
    }
}

void StateVector::apply(const GateOp& gate) {
    check_gate(gate, n_qubits_);
    if (gate.is_rotation() && gate.slot_kind != SlotKind::None) {
        throw ValidationError("apply: rotation carries an unbound parameter slot");
    }
    switch (gate.kind) {
    case GateKind::RX:
        kernels::apply_rx(amps_, n_qubits_, gate.q0, gate.angle);
        break;
    case GateKind::RY:
        kernels::apply_ry(amps_, n_qubits_, gate.q0, gate.angle);
        break;
    case GateKind::RZ:
        kernels::apply_rz(amps_, n_qubits_, gate.q0, gate.angle);
        break;
    case GateKind::CNOT:
        kernels::apply_cnot(amps_, n_qubits_, gate.q0, gate.q1);
        break;
    case GateKind::SWAP:
        kernels::apply_swap(amps_, n_qubits_, gate.q0, gate.q1);
        break;
    }
}

void StateVector::apply_all(const std::vector<GateOp>& gates) {
    for (const auto& g : gates) {
        apply(g);
    }
}

double StateVector::expectation(const ZSumObservable& obs) const {
    obs.validate(n_qubits_);
    double total = 0.0;
    for (const auto& [q, coeff] : obs.terms) {
        const std::size_t stride = bit_of(n_qubits_, q);
        double z = 0.0;
        for (std::size_t base = 0; base < amps_.size(); base += 2 * stride) {
            for (std::size_t i = base; i < base + stride; ++i) {
                z += std::norm(amps_[i]) - std::norm(amps_[i + stride]);
            }
        }
        total += coeff * z;
    }
    return total;
}

void StateVector::permute_qubits(const std::vector<int>& perm) {
    const int n = n_qubits_;
    if (static_cast<int>(perm.size()) != n) {
        throw ValidationError("permute_qubits: permutation length must equal qubit count");
    }
    std::vector<bool> hit(static_cast<std::size_t>(n), false);
    bool identity = true;
    for (int q = 0; q < n; ++q) {
        const int t = perm[static_cast<std::size_t>(q)];
        check_qubit(n, t);
        if (hit[static_cast<std::size_t>(t)]) {
            throw ValidationError("permute_qubits: map is not a bijection");
        }
        hit[static_cast<std::size_t>(t)] = true;
        identity = identity && t == q;
    }
    if (identity) {
        return;
    }
    std::vector<cplx> out(amps_.size());
    for (std::size_t b = 0; b < amps_.size(); ++b) {
        std::size_t dst = 0;
        for (int q = 0; q < n; ++q) {
            if (b & bit_of(n, q)) {
                dst |= bit_of(n, perm[static_cast<std::size_t>(q)]);
            }
        }
        out[dst] = amps_[b];
    }
    amps_ = std::move(out);
}

double StateVector::norm() const {
    double s = 0.0;
    for (const auto& a : amps_) {
        s += std::norm(a);
    }
    return std::sqrt(s);
}

std::vector<GateOp> bind_angles(const std::vector<GateOp>& gates, const std::vector<double>& params,
                                const std::vector<double>& inputs) {
    std::vector<GateOp> bound = gates;
    for (auto& g : bound) {
        if (g.slot_kind == SlotKind::Param) {
            if (g.slot < 0 || g.slot >= static_cast<int>(params.size())) {
                throw ValidationError("parameter slot " + std::to_string(g.slot) + " out of range (have " +
                                      std::to_string(params.size()) + " parameters)");
            }
            g.angle = params[static_cast<std::size_t>(g.slot)];
            g.slot_kind = SlotKind::None;
            g.slot = -1;
        } else if (g.slot_kind == SlotKind::Input) {
            if (g.slot < 0 || g.slot >= static_cast<int>(inputs.size())) {
                throw ValidationError("input slot " + std::to_string(g.slot) + " out of range (have " +
                                      std::to_string(inputs.size()) + " features)");
            }
            g.angle = inputs[static_cast<std::size_t>(g.slot)];
            g.slot_kind = SlotKind::None;
            g.slot = -1;
        }
    }
    return bound;
}

int param_slot_count(const std::vector<GateOp>& gates) {
    int m = 0;
    for (const auto& g : gates) {
        if (g.slot_kind == SlotKind::Param) {
            m = std::max(m, g.slot + 1);
        }
    }
    return m;
}

int input_slot_count(const std::vector<GateOp>& gates) {
    int m = 0;
    for (const auto& g : gates) {
        if (g.slot_kind == SlotKind::Input) {
            m = std::max(m, g.slot + 1);
        }
    }
    return m;
}

namespace {

PauliAxis generator_axis(GateKind kind) {
    switch (kind) {
    case GateKind::RX:
        return PauliAxis::X;
    case GateKind::RY:
        return PauliAxis::Y;
    case GateKind::RZ:
        return PauliAxis::Z;
    default:
        throw ValidationError("gate has no Pauli generator");
    }
}

// Im <bra| P_q |ket>, the adjoint-sweep contribution of one occurrence of a
// rotation generated by P/2.
double pauli_bilinear_im(const std::vector<cplx>& bra, const std::vector<cplx>& ket, int n, int q, PauliAxis axis) {
    cplx t[4];
    kernels::transition_matrix1q(bra, ket, n, q, t);
    switch (axis) {
    case PauliAxis::X:
        return (t[1] + t[2]).imag();
    case PauliAxis::Y:
        return (cplx{0, -1} * t[1] + cplx{0, 1} * t[2]).imag();
    default:
        return (t[0] - t[3]).imag();
    }
}

void apply_observable(std::vector<cplx>& a, int n, const ZSumObservable& obs) {
    // O is diagonal: scale each amplitude by sum_k c_k * (+-1).
    const std::size_t size = a.size();
    std::vector<double> diag(size, 0.0);
    for (const auto& [q, coeff] : obs.terms) {
        const std::size_t bit = bit_of(n, q);
        for (std::size_t i = 0; i < size; ++i) {
            diag[i] += (i & bit) ? -coeff : coeff;
        }
    }
    for (std::size_t i = 0; i < size; ++i) {
        a[i] *= diag[i];
    }
}

void unapply_gate(std::vector<cplx>& a, int n, const GateOp& g) {
    switch (g.kind) {
    case GateKind::RX:
        kernels::apply_rx(a, n, g.q0, -g.angle);
        break;
    case GateKind::RY:
        kernels::apply_ry(a, n, g.q0, -g.angle);
        break;
    case GateKind::RZ:
        kernels::apply_rz(a, n, g.q0, -g.angle);
        break;
    case GateKind::CNOT:
        kernels::apply_cnot(a, n, g.q0, g.q1);
        break;
    case GateKind::SWAP:
        kernels::apply_swap(a, n, g.q0, g.q1);
        break;
    }
}

} // namespace

GradientResult adjoint_gradient(const std::vector<GateOp>& gates, const ZSumObservable& obs, int n_qubits,
                                const std::vector<double>& params, const std::vector<double>& inputs,
                                bool want_input_grads) {
    const int n = n_qubits;
    const auto bound = bind_angles(gates, params, inputs);

    StateVector ket(n);
    ket.apply_all(bound);
    std::vector<cplx> bra = ket.amplitudes();
    apply_observable(bra, n, obs);

    GradientResult out;
    out.d_params.assign(params.size(), 0.0);
    out.d_inputs.assign(want_input_grads ? inputs.size() : 0, 0.0);

    auto& kamps = ket.amplitudes();
    for (std::size_t j = gates.size(); j-- > 0;) {
        const GateOp& raw = gates[j];
        if (raw.is_rotation() && raw.slot_kind != SlotKind::None) {
            const bool wanted = raw.slot_kind == SlotKind::Param || want_input_grads;
            if (wanted) {
                const double g = pauli_bilinear_im(bra, kamps, n, raw.q0, generator_axis(raw.kind));
                if (raw.slot_kind == SlotKind::Param) {
                    out.d_params[static_cast<std::size_t>(raw.slot)] += g;
                } else {
                    out.d_inputs[static_cast<std::size_t>(raw.slot)] += g;
                }
            }
        }
        unapply_gate(kamps, n, bound[j]);
        unapply_gate(bra, n, bound[j]);
    }
    return out;
}

GradientResult shift_rule_gradient(const std::vector<GateOp>& gates, const ZSumObservable& obs, int n_qubits,
                                   const std::vector<double>& params, const std::vector<double>& inputs,
                                   bool want_input_grads) {
    constexpr double kShift = 1.5707963267948966; // pi/2
    auto bound = bind_angles(gates, params, inputs);
    const int n = n_qubits;

    GradientResult out;
    out.d_params.assign(params.size(), 0.0);
    out.d_inputs.assign(want_input_grads ? inputs.size() : 0, 0.0);

    auto run = [&](const std::vector<GateOp>& gs) {
        StateVector sv(n);
        sv.apply_all(gs);
        return sv.expectation(obs);
    };

    for (std::size_t j = 0; j < gates.size(); ++j) {
        const GateOp& raw = gates[j];
        if (!raw.is_rotation() || raw.slot_kind == SlotKind::None) {
            continue;
        }
        if (raw.slot_kind == SlotKind::Input && !want_input_grads) {
            continue;
        }
        const double original = bound[j].angle;
        bound[j].angle = original + kShift;
        const double plus = run(bound);
        bound[j].angle = original - kShift;
        const double minus = run(bound);
        bound[j].angle = original;
        const double g = 0.5 * (plus - minus);
        if (raw.slot_kind == SlotKind::Param) {
            out.d_params[static_cast<std::size_t>(raw.slot)] += g;
        } else {
            out.d_inputs[static_cast<std::size_t>(raw.slot)] += g;
        }
    }
    return out;
}

double expectation_of_circuit(const std::vector<GateOp>& gates, const ZSumObservable& obs, int n_qubits,
                              const std::vector<double>& params, const std::vector<double>& inputs) {
    StateVector sv(n_qubits);
    sv.apply_all(bind_angles(gates, params, inputs));
    return sv.expectation(obs);
}

} // namespace c4vqc
