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

#include "c4vqc/compiled.hpp"

#include <algorithm>
#include <type_traits>
#include <cmath>
#include <cstring>
#include <string>

#if defined(__AVX512F__)
#include <immintrin.h>
#endif

#include "c4vqc/errors.hpp"

namespace c4vqc {

namespace {

inline std::size_t bit_of(int n, int q) { return std::size_t{1} << (n - 1 - q); }

inline std::array<cplx, 4> mat_mul(const std::array<cplx, 4>& a, const std::array<cplx, 4>& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}

inline std::array<cplx, 4> mat_dagger(const std::array<cplx, 4>& a) {
    return {std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])};
}

inline std::array<cplx, 4> pauli_matrix(GateKind kind) {
    switch (kind) {
    case GateKind::RX:
        return {cplx{0, 0}, cplx{1, 0}, cplx{1, 0}, cplx{0, 0}};
    case GateKind::RY:
        return {cplx{0, 0}, cplx{0, -1}, cplx{0, 1}, cplx{0, 0}};
    default:
        return {cplx{1, 0}, cplx{0, 0}, cplx{0, 0}, cplx{-1, 0}};
    }
}

// m packs the 2x2 block as {ar, ai, br, bi, cr, ci, dr, di}.
inline std::array<double, 8> pack8(const std::array<cplx, 4>& u) {
    return {u[0].real(), u[0].imag(), u[1].real(), u[1].imag(),
            u[2].real(), u[2].imag(), u[3].real(), u[3].imag()};
}

// ---- split re/im kernels --------------------------------------------------
//
// Amplitudes live in two parallel Real arrays. Large strides vectorize as
// four independent streams; strides below the SIMD width go through AVX-512
// in-register butterflies when available and a plain loop otherwise.

template <typename Real>
void apply_generic(Real* re, Real* im, std::size_t size, std::size_t stride, const double m[8]) {
    const Real ar = Real(m[0]), ai = Real(m[1]), br = Real(m[2]), bi = Real(m[3]);
    const Real cr = Real(m[4]), ci = Real(m[5]), dr = Real(m[6]), di = Real(m[7]);
    for (std::size_t base = 0; base < size; base += 2 * stride) {
        Real* __restrict r0 = re + base;
        Real* __restrict i0 = im + base;
        Real* __restrict r1 = re + base + stride;
        Real* __restrict i1 = im + base + stride;
        for (std::size_t k = 0; k < stride; ++k) {
            const Real x0r = r0[k], x0i = i0[k], x1r = r1[k], x1i = i1[k];
            r0[k] = ar * x0r - ai * x0i + br * x1r - bi * x1i;
            i0[k] = ar * x0i + ai * x0r + br * x1i + bi * x1r;
            r1[k] = cr * x0r - ci * x0i + dr * x1r - di * x1i;
            i1[k] = cr * x0i + ci * x0r + dr * x1i + di * x1r;
        }
    }
}

template <typename Real>
void transition_generic(const Real* bre, const Real* bim, const Real* kre, const Real* kim, std::size_t size,
                        std::size_t stride, double t[8]) {
    double acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    for (std::size_t base = 0; base < size; base += 2 * stride) {
        Real s[8] = {0, 0, 0, 0, 0, 0, 0, 0};
        const Real* __restrict br0 = bre + base;
        const Real* __restrict bi0 = bim + base;
        const Real* __restrict br1 = bre + base + stride;
        const Real* __restrict bi1 = bim + base + stride;
        const Real* __restrict kr0 = kre + base;
        const Real* __restrict ki0 = kim + base;
        const Real* __restrict kr1 = kre + base + stride;
        const Real* __restrict ki1 = kim + base + stride;
        for (std::size_t k = 0; k < stride; ++k) {
            s[0] += br0[k] * kr0[k] + bi0[k] * ki0[k];
            s[1] += br0[k] * ki0[k] - bi0[k] * kr0[k];
            s[2] += br0[k] * kr1[k] + bi0[k] * ki1[k];
            s[3] += br0[k] * ki1[k] - bi0[k] * kr1[k];
            s[4] += br1[k] * kr0[k] + bi1[k] * ki0[k];
            s[5] += br1[k] * ki0[k] - bi1[k] * kr0[k];
            s[6] += br1[k] * kr1[k] + bi1[k] * ki1[k];
            s[7] += br1[k] * ki1[k] - bi1[k] * kr1[k];
        }
        for (int e = 0; e < 8; ++e) {
            acc[e] += double(s[e]);
        }
    }
    for (int e = 0; e < 8; ++e) {
        t[e] = acc[e];
    }
}

#if defined(__AVX512F__)

// float lanes: 16 per vector. Sub-width strides use a lane permutation to
// fetch the butterfly partner.
void apply_avx_f32(float* re, float* im, std::size_t size, std::size_t stride, const double m[8]) {
    const __m512 ar = _mm512_set1_ps(float(m[0])), ai = _mm512_set1_ps(float(m[1]));
    const __m512 br = _mm512_set1_ps(float(m[2])), bi = _mm512_set1_ps(float(m[3]));
    const __m512 cr = _mm512_set1_ps(float(m[4])), ci = _mm512_set1_ps(float(m[5]));
    const __m512 dr = _mm512_set1_ps(float(m[6])), di = _mm512_set1_ps(float(m[7]));
    alignas(64) int idx[16];
    unsigned short lowbits = 0;
    for (int k = 0; k < 16; ++k) {
        idx[k] = k ^ int(stride);
        if (!(k & stride)) {
            lowbits = static_cast<unsigned short>(lowbits | (1u << k));
        }
    }
    const __m512i perm = _mm512_load_si512(idx);
    const __mmask16 mlow = lowbits;
    for (std::size_t w = 0; w < size; w += 16) {
        const __m512 xr = _mm512_loadu_ps(re + w);
        const __m512 xi = _mm512_loadu_ps(im + w);
        const __m512 pr = _mm512_permutexvar_ps(perm, xr);
        const __m512 pi = _mm512_permutexvar_ps(perm, xi);
        const __m512 low_r = _mm512_sub_ps(_mm512_add_ps(_mm512_mul_ps(ar, xr), _mm512_mul_ps(br, pr)),
                                           _mm512_add_ps(_mm512_mul_ps(ai, xi), _mm512_mul_ps(bi, pi)));
        const __m512 low_i = _mm512_add_ps(_mm512_add_ps(_mm512_mul_ps(ar, xi), _mm512_mul_ps(ai, xr)),
                                           _mm512_add_ps(_mm512_mul_ps(br, pi), _mm512_mul_ps(bi, pr)));
        const __m512 high_r = _mm512_sub_ps(_mm512_add_ps(_mm512_mul_ps(cr, pr), _mm512_mul_ps(dr, xr)),
                                            _mm512_add_ps(_mm512_mul_ps(ci, pi), _mm512_mul_ps(di, xi)));
        const __m512 high_i = _mm512_add_ps(_mm512_add_ps(_mm512_mul_ps(cr, pi), _mm512_mul_ps(ci, pr)),
                                            _mm512_add_ps(_mm512_mul_ps(dr, xi), _mm512_mul_ps(di, xr)));
        _mm512_storeu_ps(re + w, _mm512_mask_blend_ps(mlow, high_r, low_r));
        _mm512_storeu_ps(im + w, _mm512_mask_blend_ps(mlow, high_i, low_i));
    }
}

void apply_avx_f64(double* re, double* im, std::size_t size, std::size_t stride, const double m[8]) {
    const __m512d ar = _mm512_set1_pd(m[0]), ai = _mm512_set1_pd(m[1]);
    const __m512d br = _mm512_set1_pd(m[2]), bi = _mm512_set1_pd(m[3]);
    const __m512d cr = _mm512_set1_pd(m[4]), ci = _mm512_set1_pd(m[5]);
    const __m512d dr = _mm512_set1_pd(m[6]), di = _mm512_set1_pd(m[7]);
    alignas(64) long long idx[8];
    unsigned char lowbits = 0;
    for (int k = 0; k < 8; ++k) {
        idx[k] = k ^ int(stride);
        if (!(k & stride)) {
            lowbits = static_cast<unsigned char>(lowbits | (1u << k));
        }
    }
    const __m512i perm = _mm512_load_si512(idx);
    const __mmask8 mlow = lowbits;
    for (std::size_t w = 0; w < size; w += 8) {
        const __m512d xr = _mm512_loadu_pd(re + w);
        const __m512d xi = _mm512_loadu_pd(im + w);
        const __m512d pr = _mm512_permutexvar_pd(perm, xr);
        const __m512d pi = _mm512_permutexvar_pd(perm, xi);
        const __m512d low_r = _mm512_sub_pd(_mm512_add_pd(_mm512_mul_pd(ar, xr), _mm512_mul_pd(br, pr)),
                                            _mm512_add_pd(_mm512_mul_pd(ai, xi), _mm512_mul_pd(bi, pi)));
        const __m512d low_i = _mm512_add_pd(_mm512_add_pd(_mm512_mul_pd(ar, xi), _mm512_mul_pd(ai, xr)),
                                            _mm512_add_pd(_mm512_mul_pd(br, pi), _mm512_mul_pd(bi, pr)));
        const __m512d high_r = _mm512_sub_pd(_mm512_add_pd(_mm512_mul_pd(cr, pr), _mm512_mul_pd(dr, xr)),
                                             _mm512_add_pd(_mm512_mul_pd(ci, pi), _mm512_mul_pd(di, xi)));
        const __m512d high_i = _mm512_add_pd(_mm512_add_pd(_mm512_mul_pd(cr, pi), _mm512_mul_pd(ci, pr)),
                                             _mm512_add_pd(_mm512_mul_pd(dr, xi), _mm512_mul_pd(di, xr)));
        _mm512_storeu_pd(re + w, _mm512_mask_blend_pd(mlow, high_r, low_r));
        _mm512_storeu_pd(im + w, _mm512_mask_blend_pd(mlow, high_i, low_i));
    }
}

// Sub-width transition accumulation. Every pair is visited from both of its
// lanes, so the accumulators hold twice each T entry; halved when flushed.
void transition_avx_f32(const float* bre, const float* bim, const float* kre, const float* kim, std::size_t size,
                        std::size_t stride, double t[8]) {
    alignas(64) int idx[16];
    unsigned short lowbits = 0;
    for (int k = 0; k < 16; ++k) {
        idx[k] = k ^ int(stride);
        if (!(k & stride)) {
            lowbits = static_cast<unsigned short>(lowbits | (1u << k));
        }
    }
    const __m512i perm = _mm512_load_si512(idx);
    const __mmask16 mlow = lowbits;
    double out[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    const std::size_t chunk = 4096; // flush float accumulators periodically
    for (std::size_t c0 = 0; c0 < size; c0 += chunk) {
        __m512 a0 = _mm512_setzero_ps(), a1 = _mm512_setzero_ps(), a2 = _mm512_setzero_ps(),
               a3 = _mm512_setzero_ps(), a4 = _mm512_setzero_ps(), a5 = _mm512_setzero_ps(),
               a6 = _mm512_setzero_ps(), a7 = _mm512_setzero_ps();
        const std::size_t c1 = std::min(size, c0 + chunk);
        for (std::size_t w = c0; w < c1; w += 16) {
            const __m512 vbr = _mm512_loadu_ps(bre + w);
            const __m512 vbi = _mm512_loadu_ps(bim + w);
            const __m512 vkr = _mm512_loadu_ps(kre + w);
            const __m512 vki = _mm512_loadu_ps(kim + w);
            const __m512 pbr = _mm512_permutexvar_ps(perm, vbr);
            const __m512 pbi = _mm512_permutexvar_ps(perm, vbi);
            const __m512 pkr = _mm512_permutexvar_ps(perm, vkr);
            const __m512 pki = _mm512_permutexvar_ps(perm, vki);
            // lane-aligned (b0,b1,k0,k1) of each pair
            const __m512 b0r = _mm512_mask_blend_ps(mlow, pbr, vbr);
            const __m512 b0i = _mm512_mask_blend_ps(mlow, pbi, vbi);
            const __m512 b1r = _mm512_mask_blend_ps(mlow, vbr, pbr);
            const __m512 b1i = _mm512_mask_blend_ps(mlow, vbi, pbi);
            const __m512 k0r = _mm512_mask_blend_ps(mlow, pkr, vkr);
            const __m512 k0i = _mm512_mask_blend_ps(mlow, pki, vki);
            const __m512 k1r = _mm512_mask_blend_ps(mlow, vkr, pkr);
            const __m512 k1i = _mm512_mask_blend_ps(mlow, vki, pki);
            a0 = _mm512_fmadd_ps(b0r, k0r, _mm512_fmadd_ps(b0i, k0i, a0));
            a1 = _mm512_fmadd_ps(b0r, k0i, _mm512_fnmadd_ps(b0i, k0r, a1));
            a2 = _mm512_fmadd_ps(b0r, k1r, _mm512_fmadd_ps(b0i, k1i, a2));
            a3 = _mm512_fmadd_ps(b0r, k1i, _mm512_fnmadd_ps(b0i, k1r, a3));
            a4 = _mm512_fmadd_ps(b1r, k0r, _mm512_fmadd_ps(b1i, k0i, a4));
            a5 = _mm512_fmadd_ps(b1r, k0i, _mm512_fnmadd_ps(b1i, k0r, a5));
            a6 = _mm512_fmadd_ps(b1r, k1r, _mm512_fmadd_ps(b1i, k1i, a6));
            a7 = _mm512_fmadd_ps(b1r, k1i, _mm512_fnmadd_ps(b1i, k1r, a7));
        }
        out[0] += _mm512_reduce_add_ps(a0);
        out[1] += _mm512_reduce_add_ps(a1);
        out[2] += _mm512_reduce_add_ps(a2);
        out[3] += _mm512_reduce_add_ps(a3);
        out[4] += _mm512_reduce_add_ps(a4);
        out[5] += _mm512_reduce_add_ps(a5);
        out[6] += _mm512_reduce_add_ps(a6);
        out[7] += _mm512_reduce_add_ps(a7);
    }
    for (int e = 0; e < 8; ++e) {
        t[e] = 0.5 * out[e];
    }
}

void transition_avx_f64(const double* bre, const double* bim, const double* kre, const double* kim, std::size_t size,
                        std::size_t stride, double t[8]) {
    alignas(64) long long idx[8];
    unsigned char lowbits = 0;
    for (int k = 0; k < 8; ++k) {
        idx[k] = k ^ int(stride);
        if (!(k & stride)) {
            lowbits = static_cast<unsigned char>(lowbits | (1u << k));
        }
    }
    const __m512i perm = _mm512_load_si512(idx);
    const __mmask8 mlow = lowbits;
    __m512d a0 = _mm512_setzero_pd(), a1 = _mm512_setzero_pd(), a2 = _mm512_setzero_pd(), a3 = _mm512_setzero_pd(),
            a4 = _mm512_setzero_pd(), a5 = _mm512_setzero_pd(), a6 = _mm512_setzero_pd(), a7 = _mm512_setzero_pd();
    for (std::size_t w = 0; w < size; w += 8) {
        const __m512d vbr = _mm512_loadu_pd(bre + w);
        const __m512d vbi = _mm512_loadu_pd(bim + w);
        const __m512d vkr = _mm512_loadu_pd(kre + w);
        const __m512d vki = _mm512_loadu_pd(kim + w);
        const __m512d pbr = _mm512_permutexvar_pd(perm, vbr);
        const __m512d pbi = _mm512_permutexvar_pd(perm, vbi);
        const __m512d pkr = _mm512_permutexvar_pd(perm, vkr);
        const __m512d pki = _mm512_permutexvar_pd(perm, vki);
        const __m512d b0r = _mm512_mask_blend_pd(mlow, pbr, vbr);
        const __m512d b0i = _mm512_mask_blend_pd(mlow, pbi, vbi);
        const __m512d b1r = _mm512_mask_blend_pd(mlow, vbr, pbr);
        const __m512d b1i = _mm512_mask_blend_pd(mlow, vbi, pbi);
        const __m512d k0r = _mm512_mask_blend_pd(mlow, pkr, vkr);
        const __m512d k0i = _mm512_mask_blend_pd(mlow, pki, vki);
        const __m512d k1r = _mm512_mask_blend_pd(mlow, vkr, pkr);
        const __m512d k1i = _mm512_mask_blend_pd(mlow, vki, pki);
        a0 = _mm512_fmadd_pd(b0r, k0r, _mm512_fmadd_pd(b0i, k0i, a0));
        a1 = _mm512_fmadd_pd(b0r, k0i, _mm512_fnmadd_pd(b0i, k0r, a1));
        a2 = _mm512_fmadd_pd(b0r, k1r, _mm512_fmadd_pd(b0i, k1i, a2));
        a3 = _mm512_fmadd_pd(b0r, k1i, _mm512_fnmadd_pd(b0i, k1r, a3));
        a4 = _mm512_fmadd_pd(b1r, k0r, _mm512_fmadd_pd(b1i, k0i, a4));
        a5 = _mm512_fmadd_pd(b1r, k0i, _mm512_fnmadd_pd(b1i, k0r, a5));
        a6 = _mm512_fmadd_pd(b1r, k1r, _mm512_fmadd_pd(b1i, k1i, a6));
        a7 = _mm512_fmadd_pd(b1r, k1i, _mm512_fnmadd_pd(b1i, k1r, a7));
    }
    t[0] = 0.5 * _mm512_reduce_add_pd(a0);
    t[1] = 0.5 * _mm512_reduce_add_pd(a1);
    t[2] = 0.5 * _mm512_reduce_add_pd(a2);
    t[3] = 0.5 * _mm512_reduce_add_pd(a3);
    t[4] = 0.5 * _mm512_reduce_add_pd(a4);
    t[5] = 0.5 * _mm512_reduce_add_pd(a5);
    t[6] = 0.5 * _mm512_reduce_add_pd(a6);
    t[7] = 0.5 * _mm512_reduce_add_pd(a7);
}

#endif // __AVX512F__

template <typename Real> constexpr std::size_t simd_width() { return 64 / sizeof(Real); }

template <typename Real>
void pass_apply(Real* re, Real* im, std::size_t size, std::size_t stride, const double m[8]) {
#if defined(__AVX512F__)
    if (stride < simd_width<Real>() && size >= simd_width<Real>()) {
        if constexpr (std::is_same_v<Real, float>) {
            apply_avx_f32(re, im, size, stride, m);
        } else {
            apply_avx_f64(re, im, size, stride, m);
        }
        return;
    }
#endif
    apply_generic(re, im, size, stride, m);
}

template <typename Real>
void pass_transition(const Real* bre, const Real* bim, const Real* kre, const Real* kim, std::size_t size,
                     std::size_t stride, double t[8]) {
#if defined(__AVX512F__)
    if (stride < simd_width<Real>() && size >= simd_width<Real>()) {
        if constexpr (std::is_same_v<Real, float>) {
            transition_avx_f32(bre, bim, kre, kim, size, stride, t);
        } else {
            transition_avx_f64(bre, bim, kre, kim, size, stride, t);
        }
        return;
    }
#endif
    transition_generic(bre, bim, kre, kim, size, stride, t);
}

} // namespace

template <typename Real>
CompiledCircuitT<Real>::CompiledCircuitT(std::vector<GateOp> gates, ZSumObservable obs, int n_qubits)
    : n_qubits_(n_qubits), gates_(std::move(gates)), obs_(std::move(obs)) {
    if (n_qubits_ < 1 || n_qubits_ > 24) {
        throw ValidationError("CompiledCircuit: n_qubits out of range");
    }
    obs_.validate(n_qubits_);
    n_params_ = param_slot_count(gates_);
    n_inputs_ = input_slot_count(gates_);

    const std::size_t size = std::size_t{1} << n_qubits_;

    // Split the gate list into alternating single-qubit block stages and
    // CNOT/SWAP permutation stages.
    std::vector<QubitBlock>* open_blocks = nullptr;
    std::vector<std::size_t> open_perm;
    std::vector<std::vector<std::size_t>> perm_runs;

    auto flush_perm = [&]() {
        if (!open_perm.empty()) {
            perm_runs.push_back(open_perm);
            stages_.push_back({true, static_cast<int>(perm_runs.size() - 1)});
            open_perm.clear();
        }
    };

    for (std::size_t gi = 0; gi < gates_.size(); ++gi) {
        const GateOp& g = gates_[gi];
        if (g.q0 < 0 || g.q0 >= n_qubits_ ||
            (!g.is_rotation() && (g.q1 < 0 || g.q1 >= n_qubits_ || g.q1 == g.q0))) {
            throw ValidationError("CompiledCircuit: gate " + std::to_string(gi) + " has invalid qubits");
        }
        if (g.is_rotation()) {
            if (g.slot_kind != SlotKind::None && g.slot < 0) {
                throw ValidationError("CompiledCircuit: negative slot index");
            }
            flush_perm();
            if (open_blocks == nullptr) {
                block_stages_.emplace_back();
                open_blocks = &block_stages_.back();
                stages_.push_back({false, static_cast<int>(block_stages_.size() - 1)});
            }
            QubitBlock* blk = nullptr;
            for (auto& b : *open_blocks) {
                if (b.qubit == g.q0) {
                    blk = &b;
                    break;
                }
            }
            if (blk == nullptr) {
                open_blocks->push_back(QubitBlock{g.q0, {}, false});
                blk = &open_blocks->back();
            }
            blk->gates.push_back({g.kind, g.slot_kind, g.slot, g.angle});
            blk->any_slot = blk->any_slot || g.slot_kind != SlotKind::None;
        } else {
            open_blocks = nullptr;
            open_perm.push_back(gi);
        }
    }
    flush_perm();

    for (auto& blocks : block_stages_) {
        std::sort(blocks.begin(), blocks.end(),
                  [](const QubitBlock& a, const QubitBlock& b) { return a.qubit < b.qubit; });
    }

    // Permutation tables; identical runs share one table.
    std::vector<std::vector<std::uint64_t>> keys;
    for (const auto& run : perm_runs) {
        std::vector<std::uint64_t> key;
        key.reserve(run.size());
        for (std::size_t gi : run) {
            const GateOp& g = gates_[gi];
            key.push_back((static_cast<std::uint64_t>(g.kind) << 48) | (static_cast<std::uint64_t>(g.q0) << 24) |
                          static_cast<std::uint64_t>(g.q1));
        }
        int id = -1;
        for (std::size_t k = 0; k < keys.size(); ++k) {
            if (keys[k] == key) {
                id = static_cast<int>(k);
                break;
            }
        }
        if (id < 0) {
            keys.push_back(key);
            std::vector<std::uint32_t> fwd(size), inv(size);
            for (std::size_t b = 0; b < size; ++b) {
                std::size_t x = b;
                for (std::size_t gi : run) {
                    const GateOp& g = gates_[gi];
                    const std::size_t b0 = bit_of(n_qubits_, g.q0);
                    const std::size_t b1 = bit_of(n_qubits_, g.q1);
                    if (g.kind == GateKind::CNOT) {
                        if (x & b0) {
                            x ^= b1;
                        }
                    } else { // SWAP
                        const bool v0 = (x & b0) != 0;
                        const bool v1 = (x & b1) != 0;
                        if (v0 != v1) {
                            x ^= b0 | b1;
                        }
                    }
                }
                fwd[b] = static_cast<std::uint32_t>(x);
                inv[x] = static_cast<std::uint32_t>(b);
            }
            perm_fwd_.push_back(std::move(fwd));
            perm_inv_.push_back(std::move(inv));
            id = static_cast<int>(perm_fwd_.size() - 1);
        }
        stage_perm_id_.push_back(id);
    }

    obs_diag_.resize(size);
    for (std::size_t i = 0; i < size; ++i) {
        double d = 0.0;
        for (const auto& [q, coeff] : obs_.terms) {
            d += (i & bit_of(n_qubits_, q)) ? -coeff : coeff;
        }
        obs_diag_[i] = static_cast<Real>(d);
    }
}

template <typename Real>
double CompiledCircuitT<Real>::angle_of(const GateRef& g, const std::vector<double>& params,
                                        const std::vector<double>& inputs) const {
    switch (g.slot_kind) {
    case SlotKind::Param:
        return params[static_cast<std::size_t>(g.slot)];
    case SlotKind::Input:
        return inputs[static_cast<std::size_t>(g.slot)];
    default:
        return g.bound_angle;
    }
}

template <typename Real>
std::array<cplx, 4> CompiledCircuitT<Real>::block_matrix(const QubitBlock& b, const std::vector<double>& params,
                                                         const std::vector<double>& inputs) const {
    std::array<cplx, 4> u{cplx{1, 0}, cplx{0, 0}, cplx{0, 0}, cplx{1, 0}};
    for (const auto& g : b.gates) {
        cplx m[4];
        rotation_matrix(g.kind, angle_of(g, params, inputs), m);
        u = mat_mul(std::array<cplx, 4>{m[0], m[1], m[2], m[3]}, u); // later gates on the left
    }
    return u;
}

template <typename Real>
void CompiledCircuitT<Real>::run_forward(const std::vector<double>& params, const std::vector<double>& inputs,
                                         Scratch& s) const {
    if (static_cast<int>(params.size()) < n_params_) {
        throw ValidationError("forward: expected at least " + std::to_string(n_params_) + " parameters, got " +
                              std::to_string(params.size()));
    }
    if (static_cast<int>(inputs.size()) < n_inputs_) {
        throw ValidationError("forward: expected at least " + std::to_string(n_inputs_) + " input features, got " +
                              std::to_string(inputs.size()));
    }
    const std::size_t size = std::size_t{1} << n_qubits_;
    s.ket_re.resize(size);
    s.ket_im.resize(size);
    s.tmp_re.resize(size);
    s.tmp_im.resize(size);

    std::size_t first_stage = 0;
    if (!stages_.empty() && !stages_[0].is_perm) {
        // |0..0> through a pure single-qubit stage is a product state; build
        // it by doubling instead of sweeping per qubit.
        std::array<std::array<cplx, 2>, 32> col;
        for (int q = 0; q < n_qubits_; ++q) {
            col[static_cast<std::size_t>(q)] = {cplx{1, 0}, cplx{0, 0}};
        }
        for (const auto& b : block_stages_[0]) {
            const auto u = block_matrix(b, params, inputs);
            col[static_cast<std::size_t>(b.qubit)] = {u[0], u[2]};
        }
        s.ket_re[0] = Real(1);
        s.ket_im[0] = Real(0);
        std::size_t len = 1;
        for (int q = 0; q < n_qubits_; ++q) {
            const auto& c = col[static_cast<std::size_t>(q)];
            const Real c0r = Real(c[0].real()), c0i = Real(c[0].imag());
            const Real c1r = Real(c[1].real()), c1i = Real(c[1].imag());
            for (std::size_t i = len; i-- > 0;) {
                const Real vr = s.ket_re[i], vi = s.ket_im[i];
                s.ket_re[2 * i] = vr * c0r - vi * c0i;
                s.ket_im[2 * i] = vr * c0i + vi * c0r;
                s.ket_re[2 * i + 1] = vr * c1r - vi * c1i;
                s.ket_im[2 * i + 1] = vr * c1i + vi * c1r;
            }
            len *= 2;
        }
        first_stage = 1;
    } else {
        std::fill(s.ket_re.begin(), s.ket_re.end(), Real(0));
        std::fill(s.ket_im.begin(), s.ket_im.end(), Real(0));
        s.ket_re[0] = Real(1);
    }

    for (std::size_t si = first_stage; si < stages_.size(); ++si) {
        const Stage& st = stages_[si];
        if (st.is_perm) {
            const auto& inv = perm_inv_[static_cast<std::size_t>(stage_perm_id_[static_cast<std::size_t>(st.index)])];
            const Real* __restrict ir = s.ket_re.data();
            const Real* __restrict ii = s.ket_im.data();
            Real* __restrict orr = s.tmp_re.data();
            Real* __restrict oi = s.tmp_im.data();
            for (std::size_t i = 0; i < size; ++i) {
                const std::uint32_t j = inv[i];
                orr[i] = ir[j];
                oi[i] = ii[j];
            }
            std::swap(s.ket_re, s.tmp_re);
            std::swap(s.ket_im, s.tmp_im);
        } else {
            for (const auto& b : block_stages_[static_cast<std::size_t>(st.index)]) {
                const auto m = pack8(block_matrix(b, params, inputs));
                pass_apply(s.ket_re.data(), s.ket_im.data(), size, bit_of(n_qubits_, b.qubit), m.data());
            }
        }
    }
}

template <typename Real> double CompiledCircuitT<Real>::obs_value(const Scratch& s) const {
    const std::size_t size = s.ket_re.size();
    const Real* __restrict kr = s.ket_re.data();
    const Real* __restrict ki = s.ket_im.data();
    const Real* __restrict d = obs_diag_.data();
    double v = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        v += static_cast<double>(d[i] * (kr[i] * kr[i] + ki[i] * ki[i]));
    }
    return v;
}

template <typename Real>
double CompiledCircuitT<Real>::forward(const std::vector<double>& params, const std::vector<double>& inputs,
                                       Scratch& s) const {
    run_forward(params, inputs, s);
    return obs_value(s);
}

template <typename Real>
ValueGrad CompiledCircuitT<Real>::gradient(const std::vector<double>& params, const std::vector<double>& inputs,
                                           Scratch& s, bool want_input_grads) const {
    ValueGrad out;
    run_forward(params, inputs, s);
    const std::size_t size = s.ket_re.size();
    s.bra_re.resize(size);
    s.bra_im.resize(size);
    {
        const Real* __restrict kr = s.ket_re.data();
        const Real* __restrict ki = s.ket_im.data();
        Real* __restrict br = s.bra_re.data();
        Real* __restrict bi = s.bra_im.data();
        const Real* __restrict dg = obs_diag_.data();
        double value = 0.0;
        for (std::size_t i = 0; i < size; ++i) {
            const Real d = dg[i];
            value += static_cast<double>(d * (kr[i] * kr[i] + ki[i] * ki[i]));
            br[i] = d * kr[i];
            bi[i] = d * ki[i];
        }
        out.value = value;
    }
    out.d_params.assign(params.size(), 0.0);
    out.d_inputs.assign(want_input_grads ? inputs.size() : 0, 0.0);
    s.tmp2_re.resize(size);
    s.tmp2_im.resize(size);

    for (std::size_t si = stages_.size(); si-- > 0;) {
        const Stage& st = stages_[si];
        if (st.is_perm) {
            if (si == 0) {
                break; // nothing differentiable precedes it
            }
            const auto& fwd = perm_fwd_[static_cast<std::size_t>(stage_perm_id_[static_cast<std::size_t>(st.index)])];
            // inverse permutation application: out[i] = in[fwd[i]]
            const Real* __restrict ikr = s.ket_re.data();
            const Real* __restrict iki = s.ket_im.data();
            const Real* __restrict ibr = s.bra_re.data();
            const Real* __restrict ibi = s.bra_im.data();
            Real* __restrict okr = s.tmp_re.data();
            Real* __restrict oki = s.tmp_im.data();
            Real* __restrict obr = s.tmp2_re.data();
            Real* __restrict obi = s.tmp2_im.data();
            for (std::size_t i = 0; i < size; ++i) {
                const std::uint32_t j = fwd[i];
                okr[i] = ikr[j];
                oki[i] = iki[j];
                obr[i] = ibr[j];
                obi[i] = ibi[j];
            }
            std::swap(s.ket_re, s.tmp_re);
            std::swap(s.ket_im, s.tmp_im);
            std::swap(s.bra_re, s.tmp2_re);
            std::swap(s.bra_im, s.tmp2_im);
        } else {
            for (const auto& b : block_stages_[static_cast<std::size_t>(st.index)]) {
                const std::size_t stride = bit_of(n_qubits_, b.qubit);
                const bool want_t =
                    b.any_slot &&
                    (want_input_grads || std::any_of(b.gates.begin(), b.gates.end(), [](const GateRef& g) {
                         return g.slot_kind == SlotKind::Param;
                     }));
                if (want_t) {
                    double t8[8];
                    pass_transition(s.bra_re.data(), s.bra_im.data(), s.ket_re.data(), s.ket_im.data(), size, stride,
                                    t8);
                    const cplx t[4] = {{t8[0], t8[1]}, {t8[2], t8[3]}, {t8[4], t8[5]}, {t8[6], t8[7]}};
                    // suffix = U_m ... U_{j+1}; occurrence gradient is
                    // Im sum_st (suffix P suffix^dag)_st T_st
                    std::array<cplx, 4> suffix{cplx{1, 0}, cplx{0, 0}, cplx{0, 0}, cplx{1, 0}};
                    for (std::size_t j = b.gates.size(); j-- > 0;) {
                        const GateRef& gr = b.gates[j];
                        if (gr.slot_kind != SlotKind::None && (gr.slot_kind == SlotKind::Param || want_input_grads)) {
                            const auto a = mat_mul(mat_mul(suffix, pauli_matrix(gr.kind)), mat_dagger(suffix));
                            const double grad = (a[0] * t[0] + a[1] * t[1] + a[2] * t[2] + a[3] * t[3]).imag();
                            if (gr.slot_kind == SlotKind::Param) {
                                out.d_params[static_cast<std::size_t>(gr.slot)] += grad;
                            } else {
                                out.d_inputs[static_cast<std::size_t>(gr.slot)] += grad;
                            }
                        }
                        if (j > 0) {
                            cplx m[4];
                            rotation_matrix(gr.kind, angle_of(gr, params, inputs), m);
                            suffix = mat_mul(suffix, std::array<cplx, 4>{m[0], m[1], m[2], m[3]});
                        }
                    }
                }
                if (si > 0) {
                    const auto mdag = pack8(mat_dagger(block_matrix(b, params, inputs)));
                    pass_apply(s.ket_re.data(), s.ket_im.data(), size, stride, mdag.data());
                    pass_apply(s.bra_re.data(), s.bra_im.data(), size, stride, mdag.data());
                }
            }
        }
    }
    return out;
}

template <typename Real>
ValueGrad CompiledCircuitT<Real>::shift_gradient(const std::vector<double>& params, const std::vector<double>& inputs,
                                                 Scratch& s, bool want_input_grads) const {
    ValueGrad out;
    out.value = forward(params, inputs, s);
    GradientResult g = shift_rule_gradient(gates_, obs_, n_qubits_, params, inputs, want_input_grads);
    out.d_params = std::move(g.d_params);
    out.d_inputs = std::move(g.d_inputs);
    return out;
}

template class CompiledCircuitT<double>;
template class CompiledCircuitT<float>;

} // namespace c4vqc
