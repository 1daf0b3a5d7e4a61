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

#include "c4vqc/cnn.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "c4vqc/errors.hpp"
#include "c4vqc/symmetry.hpp"

namespace c4vqc {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

int conv_output_side(int side, int filter, int stride, int padding) {
    if (stride < 1 || padding < 0 || filter < 1) {
        throw ValidationError("conv: stride must be >= 1, padding >= 0, filter >= 1");
    }
    const int span = side + 2 * padding - filter;
    if (span < 0 || span % stride != 0) {
        throw ValidationError("conv: output side (" + std::to_string(side) + " + 2*" + std::to_string(padding) +
                              " - " + std::to_string(filter) + ")/" + std::to_string(stride) +
                              " + 1 is not a positive integer");
    }
    return span / stride + 1;
}

Tensor4 conv2d_valid(const Tensor4& x, const Filter& f, int stride, int padding) {
    if (x.h != x.w) {
        throw ValidationError("conv2d_valid: input must be square");
    }
    if (f.h != f.w) {
        throw ValidationError("conv2d_valid: filter must be square");
    }
    if (f.c_in != x.c) {
        throw ValidationError("conv2d_valid: filter expects " + std::to_string(f.c_in) + " channels, input has " +
                              std::to_string(x.c));
    }
    const int out_side = conv_output_side(x.h, f.h, stride, padding);
    Tensor4 out(x.n, out_side, out_side, f.c_out);
    for (int in = 0; in < x.n; ++in) {
        for (int i = 0; i < out_side; ++i) {
            for (int j = 0; j < out_side; ++j) {
                for (int u = 0; u < f.h; ++u) {
                    const int a = i * stride + u - padding;
                    if (a < 0 || a >= x.h) {
                        continue;
                    }
                    for (int t = 0; t < f.w; ++t) {
                        const int b = j * stride + t - padding;
                        if (b < 0 || b >= x.w) {
                            continue;
                        }
                        for (int ci = 0; ci < x.c; ++ci) {
                            const double xv = x.at(in, a, b, ci);
                            for (int co = 0; co < f.c_out; ++co) {
                                out.at(in, i, j, co) += xv * f.at(u, t, ci, co);
                            }
                        }
                    }
                }
            }
        }
    }
    return out;
}

Filter rotate_filter(const Filter& f, int times) {
    if (f.h != f.w) {
        throw ValidationError("rotate_filter: filter must be square");
    }
    Filter cur = f;
    for (int r = 0; r < (times & 3); ++r) {
        Filter next(cur.h, cur.w, cur.c_in, cur.c_out);
        for (int u = 0; u < cur.h; ++u) {
            for (int t = 0; t < cur.w; ++t) {
                for (int ci = 0; ci < cur.c_in; ++ci) {
                    for (int co = 0; co < cur.c_out; ++co) {
                        next.at(u, t, ci, co) = cur.at(cur.h - 1 - t, u, ci, co);
                    }
                }
            }
        }
        cur = std::move(next);
    }
    return cur;
}

Tensor4 rotate_tensor(const Tensor4& x, int times) {
    if (x.h != x.w) {
        throw ValidationError("rotate_tensor: tensor must be spatially square");
    }
    Tensor4 cur = x;
    for (int r = 0; r < (times & 3); ++r) {
        Tensor4 next(cur.n, cur.h, cur.w, cur.c);
        for (int in = 0; in < cur.n; ++in) {
            for (int i = 0; i < cur.h; ++i) {
                for (int j = 0; j < cur.w; ++j) {
                    for (int ch = 0; ch < cur.c; ++ch) {
                        next.at(in, i, j, ch) = cur.at(in, cur.h - 1 - j, i, ch);
                    }
                }
            }
        }
        cur = std::move(next);
    }
    return cur;
}

Tensor4 gconv(const Tensor4& x, const Filter& f, int stride, int padding) {
    Tensor4 out = conv2d_valid(x, f, stride, padding);
    for (int t = 1; t < 4; ++t) {
        const Tensor4 part = conv2d_valid(x, rotate_filter(f, t), stride, padding);
        for (std::size_t k = 0; k < out.v.size(); ++k) {
            out.v[k] += part.v[k];
        }
    }
    for (auto& val : out.v) {
        val *= 0.25;
    }
    return out;
}

Tensor4 avg_pool(const Tensor4& x, int window) {
    if (window < 1) {
        throw ValidationError("avg_pool: window must be >= 1");
    }
    if (window == 1) {
        return x;
    }
    if (x.h % window != 0 || x.w % window != 0) {
        throw ValidationError("avg_pool: side " + std::to_string(x.h) + " not divisible by window " +
                              std::to_string(window));
    }
    Tensor4 out(x.n, x.h / window, x.w / window, x.c);
    const double inv = 1.0 / (static_cast<double>(window) * static_cast<double>(window));
    for (int in = 0; in < x.n; ++in) {
        for (int i = 0; i < out.h; ++i) {
            for (int j = 0; j < out.w; ++j) {
                for (int ch = 0; ch < x.c; ++ch) {
                    double s = 0.0;
                    for (int u = 0; u < window; ++u) {
                        for (int t = 0; t < window; ++t) {
                            s += x.at(in, i * window + u, j * window + t, ch);
                        }
                    }
                    out.at(in, i, j, ch) = s * inv;
                }
            }
        }
    }
    return out;
}

Tensor4 relu(const Tensor4& x) {
    Tensor4 out = x;
    for (auto& v : out.v) {
        v = std::max(0.0, v);
    }
    return out;
}

std::vector<std::pair<int, int>> shape_chain(const CnnPipelineSpec& spec) {
    std::vector<std::pair<int, int>> chain;
    int side = spec.input_side;
    int channels = spec.input_channels;
    chain.emplace_back(side, channels);
    for (std::size_t l = 0; l < spec.layers.size(); ++l) {
        const auto& layer = spec.layers[l];
        try {
            side = conv_output_side(side, layer.n_w, 1, 0);
            if (layer.pool > 1) {
                if (side % layer.pool != 0) {
                    throw ValidationError("pool window " + std::to_string(layer.pool) + " does not divide side " +
                                          std::to_string(side));
                }
                side /= layer.pool;
            }
        } catch (const ValidationError& e) {
            throw ValidationError("shape chain fails at layer " + std::to_string(l) + ": " + e.what());
        }
        channels = layer.c_out;
        chain.emplace_back(side, channels);
    }
    return chain;
}

CnnPipeline::CnnPipeline(const CnnPipelineSpec& spec, std::uint64_t seed) : spec_(spec) {
    const auto chain = shape_chain(spec);
    final_side_ = chain.back().first;
    final_channels_ = chain.back().second;
    feature_count_ = final_side_ * final_side_ * final_channels_;

    std::mt19937_64 rng(seed);
    int c_in = spec.input_channels;
    for (const auto& layer : spec.layers) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.n_w) * layer.n_w * c_in);
        std::uniform_real_distribution<double> u(-bound, bound);
        Filter f(layer.n_w, layer.n_w, c_in, layer.c_out);
        for (auto& v : f.v) {
            v = u(rng);
        }
        filters_.push_back(std::move(f));
        c_in = layer.c_out;
    }
    rescale_lo_.assign(static_cast<std::size_t>(feature_count_), 0.0);
    rescale_hi_.assign(static_cast<std::size_t>(feature_count_), spec.rescale_max);
}

int CnnPipeline::parameter_count() const {
    int count = 0;
    for (const auto& f : filters_) {
        count += static_cast<int>(f.v.size());
    }
    return count;
}

std::vector<double> CnnPipeline::rescale_features(const std::vector<double>& raw) const {
    std::vector<double> out(raw.size());
    for (std::size_t k = 0; k < raw.size(); ++k) {
        const double span = rescale_hi_[k] - rescale_lo_[k];
        out[k] = -kPi + 2.0 * kPi * (raw[k] - rescale_lo_[k]) / span;
    }
    return out;
}

CnnPipeline::Forward CnnPipeline::forward(const Tensor4& x) const {
    if (x.h != spec_.input_side || x.w != spec_.input_side || x.c != spec_.input_channels) {
        throw ValidationError("pipeline forward: input shape mismatch");
    }
    Forward fw;
    Tensor4 cur = x;
    for (std::size_t l = 0; l < filters_.size(); ++l) {
        fw.layer_inputs.push_back(cur);
        Tensor4 a = gconv(cur, filters_[l], 1, 0);
        fw.pre_relu.push_back(a);
        Tensor4 b = spec_.relu_after_conv ? relu(a) : a;
        cur = spec_.layers[l].pool > 1 ? avg_pool(b, spec_.layers[l].pool) : std::move(b);
    }
    fw.final_tensor = cur;
    fw.features.resize(static_cast<std::size_t>(cur.n));
    for (int in = 0; in < cur.n; ++in) {
        std::vector<double> raw(static_cast<std::size_t>(feature_count_));
        std::copy(cur.v.begin() + static_cast<std::ptrdiff_t>(cur.index(in, 0, 0, 0)),
                  cur.v.begin() + static_cast<std::ptrdiff_t>(cur.index(in, 0, 0, 0)) + feature_count_, raw.begin());
        fw.features[static_cast<std::size_t>(in)] = rescale_features(raw);
    }
    return fw;
}

CnnPipeline::Backward CnnPipeline::backward(const Forward& cache, const std::vector<std::vector<double>>& upstream) const {
    if (cache.layer_inputs.empty() && !filters_.empty()) {
        throw ValidationError("pipeline backward: forward cache missing");
    }
    const Tensor4& final_tensor = cache.final_tensor;
    if (static_cast<int>(upstream.size()) != final_tensor.n) {
        throw ValidationError("pipeline backward: upstream batch size mismatch");
    }

    // through the rescale affine map
    Tensor4 grad(final_tensor.n, final_tensor.h, final_tensor.w, final_tensor.c);
    for (int in = 0; in < final_tensor.n; ++in) {
        if (static_cast<int>(upstream[static_cast<std::size_t>(in)].size()) != feature_count_) {
            throw ValidationError("pipeline backward: upstream feature length mismatch");
        }
        for (int k = 0; k < feature_count_; ++k) {
            const double span = rescale_hi_[static_cast<std::size_t>(k)] - rescale_lo_[static_cast<std::size_t>(k)];
            grad.v[grad.index(in, 0, 0, 0) + static_cast<std::size_t>(k)] =
                upstream[static_cast<std::size_t>(in)][static_cast<std::size_t>(k)] * 2.0 * kPi / span;
        }
    }

    Backward bw;
    bw.filter_grads.resize(filters_.size());
    for (std::size_t l = filters_.size(); l-- > 0;) {
        const auto& layer = spec_.layers[l];
        const Tensor4& a = cache.pre_relu[l];
        const Tensor4& x = cache.layer_inputs[l];

        // undo pooling: distribute uniformly
        Tensor4 da;
        if (layer.pool > 1) {
            da = Tensor4(a.n, a.h, a.w, a.c);
            const double inv = 1.0 / (static_cast<double>(layer.pool) * layer.pool);
            for (int in = 0; in < a.n; ++in) {
                for (int i = 0; i < grad.h; ++i) {
                    for (int j = 0; j < grad.w; ++j) {
                        for (int ch = 0; ch < a.c; ++ch) {
                            const double g = grad.at(in, i, j, ch) * inv;
                            for (int u = 0; u < layer.pool; ++u) {
                                for (int t = 0; t < layer.pool; ++t) {
                                    da.at(in, i * layer.pool + u, j * layer.pool + t, ch) = g;
                                }
                            }
                        }
                    }
                }
            }
        } else {
            da = grad;
        }
        // ReLU mask
        if (spec_.relu_after_conv) {
            for (std::size_t k = 0; k < da.v.size(); ++k) {
                da.v[k] = a.v[k] > 0.0 ? da.v[k] : 0.0;
            }
        }
        // gconv backward: average over the four rotated branches
        const Filter& f = filters_[l];
        Filter fgrad(f.h, f.w, f.c_in, f.c_out);
        Tensor4 dx(x.n, x.h, x.w, x.c);
        for (int t = 0; t < 4; ++t) {
            const Filter ft = rotate_filter(f, t);
            Filter gt(f.h, f.w, f.c_in, f.c_out);
            for (int in = 0; in < x.n; ++in) {
                for (int i = 0; i < da.h; ++i) {
                    for (int j = 0; j < da.w; ++j) {
                        for (int co = 0; co < f.c_out; ++co) {
                            const double g = 0.25 * da.at(in, i, j, co);
                            if (g == 0.0) {
                                continue;
                            }
                            for (int u = 0; u < f.h; ++u) {
                                for (int tt = 0; tt < f.w; ++tt) {
                                    for (int ci = 0; ci < f.c_in; ++ci) {
                                        gt.at(u, tt, ci, co) += g * x.at(in, i + u, j + tt, ci);
                                        dx.at(in, i + u, j + tt, ci) += g * ft.at(u, tt, ci, co);
                                    }
                                }
                            }
                        }
                    }
                }
            }
            const Filter gt_back = rotate_filter(gt, (4 - t) & 3);
            for (std::size_t k = 0; k < fgrad.v.size(); ++k) {
                fgrad.v[k] += gt_back.v[k];
            }
        }
        bw.filter_grads[l] = std::move(fgrad);
        grad = std::move(dx);
    }
    bw.input_grad = std::move(grad);
    return bw;
}

void CnnPipeline::calibrate_rescale(const Tensor4& final_tensor) {
    if (final_tensor.h != final_side_ || final_tensor.c != final_channels_) {
        throw ValidationError("calibrate_rescale: tensor shape mismatch");
    }
    std::vector<double> lo(static_cast<std::size_t>(feature_count_), 1e300);
    std::vector<double> hi(static_cast<std::size_t>(feature_count_), -1e300);
    for (int in = 0; in < final_tensor.n; ++in) {
        const std::size_t base = final_tensor.index(in, 0, 0, 0);
        for (int k = 0; k < feature_count_; ++k) {
            const double v = final_tensor.v[base + static_cast<std::size_t>(k)];
            lo[static_cast<std::size_t>(k)] = std::min(lo[static_cast<std::size_t>(k)], v);
            hi[static_cast<std::size_t>(k)] = std::max(hi[static_cast<std::size_t>(k)], v);
        }
    }
    // tie ranges across each C4 orbit of the final grid so that rotation
    // stays an exact feature permutation
    const OrbitTable orbits = compute_orbits(final_side_);
    std::vector<double> tied_lo = lo, tied_hi = hi;
    for (const auto& orbit : orbits.orbits) {
        for (int ch = 0; ch < final_channels_; ++ch) {
            double alo = 0.0, ahi = 0.0;
            for (const auto& p : orbit) {
                const std::size_t k =
                    static_cast<std::size_t>((p.i * final_side_ + p.j) * final_channels_ + ch);
                alo += lo[k];
                ahi += hi[k];
            }
            alo /= static_cast<double>(orbit.size());
            ahi /= static_cast<double>(orbit.size());
            for (const auto& p : orbit) {
                const std::size_t k =
                    static_cast<std::size_t>((p.i * final_side_ + p.j) * final_channels_ + ch);
                tied_lo[k] = alo;
                tied_hi[k] = ahi;
            }
        }
    }
    for (std::size_t k = 0; k < tied_lo.size(); ++k) {
        if (tied_hi[k] - tied_lo[k] < 1e-9) {
            tied_hi[k] = tied_lo[k] + 1.0; // dead feature: keep the map finite
        }
    }
    rescale_lo_ = std::move(tied_lo);
    rescale_hi_ = std::move(tied_hi);
    calibrated_ = true;
}

void CnnPipeline::set_rescale(std::vector<double> lo, std::vector<double> hi) {
    if (static_cast<int>(lo.size()) != feature_count_ || static_cast<int>(hi.size()) != feature_count_) {
        throw ValidationError("set_rescale: length mismatch");
    }
    rescale_lo_ = std::move(lo);
    rescale_hi_ = std::move(hi);
    calibrated_ = true;
}

std::vector<double> CnnPipeline::flat_filters() const {
    std::vector<double> out;
    for (const auto& f : filters_) {
        out.insert(out.end(), f.v.begin(), f.v.end());
    }
    return out;
}

void CnnPipeline::set_flat_filters(const std::vector<double>& values) {
    std::size_t at = 0;
    for (auto& f : filters_) {
        if (at + f.v.size() > values.size()) {
            throw ValidationError("set_flat_filters: length mismatch");
        }
        std::copy(values.begin() + static_cast<std::ptrdiff_t>(at),
                  values.begin() + static_cast<std::ptrdiff_t>(at + f.v.size()), f.v.begin());
        at += f.v.size();
    }
    if (at != values.size()) {
        throw ValidationError("set_flat_filters: length mismatch");
    }
}

} // namespace c4vqc
