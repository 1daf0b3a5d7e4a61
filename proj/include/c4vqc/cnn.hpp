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
 * Rotation-equivariant classical convolution front-end: G-convolution
 * (plain cross-correlation averaged over the four filter rotations), ReLU,
 * average pooling, the shape algebra and analytic backpropagation.
 *
 * "Convolution" here is cross-correlation, the usual ML convention; the
 * textbook flip only reindexes a learned filter.
 */

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace c4vqc {

/// Row-major (N, H, W, C) tensor of doubles. H == W throughout the pipeline.
struct Tensor4 {
    int n = 0, h = 0, w = 0, c = 0;
    std::vector<double> v;

    Tensor4() = default;
    Tensor4(int n_, int h_, int w_, int c_)
        : n(n_), h(h_), w(w_), c(c_),
          v(static_cast<std::size_t>(n_) * static_cast<std::size_t>(h_) * static_cast<std::size_t>(w_) *
            static_cast<std::size_t>(c_)) {}

    std::size_t index(int in, int i, int j, int ic) const {
        return ((static_cast<std::size_t>(in) * static_cast<std::size_t>(h) + static_cast<std::size_t>(i)) *
                    static_cast<std::size_t>(w) +
                static_cast<std::size_t>(j)) *
                   static_cast<std::size_t>(c) +
               static_cast<std::size_t>(ic);
    }
    double at(int in, int i, int j, int ic) const { return v[index(in, i, j, ic)]; }
    double& at(int in, int i, int j, int ic) { return v[index(in, i, j, ic)]; }
};

/// Row-major (h, w, c_in, c_out) filter bank; h == w.
struct Filter {
    int h = 0, w = 0, c_in = 0, c_out = 0;
    std::vector<double> v;

    Filter() = default;
    Filter(int h_, int w_, int ci, int co)
        : h(h_), w(w_), c_in(ci), c_out(co),
          v(static_cast<std::size_t>(h_) * static_cast<std::size_t>(w_) * static_cast<std::size_t>(ci) *
            static_cast<std::size_t>(co)) {}

    std::size_t index(int u, int t, int ci, int co) const {
        return ((static_cast<std::size_t>(u) * static_cast<std::size_t>(w) + static_cast<std::size_t>(t)) *
                    static_cast<std::size_t>(c_in) +
                static_cast<std::size_t>(ci)) *
                   static_cast<std::size_t>(c_out) +
               static_cast<std::size_t>(co);
    }
    double at(int u, int t, int ci, int co) const { return v[index(u, t, ci, co)]; }
    double& at(int u, int t, int ci, int co) { return v[index(u, t, ci, co)]; }
};

/// Output side per conv step: (side + 2*padding - filter)/stride + 1;
/// throws unless positive and integral.
int conv_output_side(int side, int filter, int stride, int padding);

Tensor4 conv2d_valid(const Tensor4& x, const Filter& f, int stride = 1, int padding = 0);
Filter rotate_filter(const Filter& f, int times);
/// Spatial quarter-turns of every sample and channel: x'[i][j] = x[n-1-j][i].
Tensor4 rotate_tensor(const Tensor4& x, int times);
Tensor4 gconv(const Tensor4& x, const Filter& f, int stride = 1, int padding = 0);
Tensor4 avg_pool(const Tensor4& x, int window);
Tensor4 relu(const Tensor4& x);

struct CnnLayerSpec {
    int n_w = 3;   // filter side
    int c_out = 1; // output channels
    int pool = 0;  // average-pool window; 0 or 1 = none
};

struct CnnPipelineSpec {
    int input_side = 16;
    int input_channels = 1;
    std::vector<CnnLayerSpec> layers;
    bool relu_after_conv = true;
    double rescale_max = 1.0; // fixed activation range [0, rescale_max] before calibration
};

/// (side, channels) after the input and after every layer; throws a shape
/// error naming the offending stage.
std::vector<std::pair<int, int>> shape_chain(const CnnPipelineSpec& spec);

class CnnPipeline {
  public:
    CnnPipeline() = default;
    /// Fan-in scaled uniform filter initialization, seeded.
    CnnPipeline(const CnnPipelineSpec& spec, std::uint64_t seed);

    const CnnPipelineSpec& spec() const { return spec_; }
    std::vector<Filter>& filters() { return filters_; }
    const std::vector<Filter>& filters() const { return filters_; }
    int feature_count() const { return feature_count_; }
    int parameter_count() const;

    struct Forward {
        std::vector<std::vector<double>> features; // per sample, rescaled to [-pi, pi]
        // caches for backward
        std::vector<Tensor4> layer_inputs; // x_l per layer
        std::vector<Tensor4> pre_relu;     // gconv output per layer
        Tensor4 final_tensor;
    };
    Forward forward(const Tensor4& x) const;

    struct Backward {
        std::vector<Filter> filter_grads;
        Tensor4 input_grad;
    };
    /// upstream: per sample, dLoss/dFeature in the rescaled space.
    Backward backward(const Forward& cache, const std::vector<std::vector<double>>& upstream) const;

    /// Freezes per-feature ranges from raw (pre-rescale) activations, with
    /// lo/hi tied across each C4 orbit of the final grid so rotating the
    /// input still permutes features exactly.
    void calibrate_rescale(const Tensor4& final_tensor);
    bool calibrated() const { return calibrated_; }
    const std::vector<double>& rescale_lo() const { return rescale_lo_; }
    const std::vector<double>& rescale_hi() const { return rescale_hi_; }
    void set_rescale(std::vector<double> lo, std::vector<double> hi);

    /// Flat view of all filter values, ordered by layer; used by the joint
    /// optimizer.
    std::vector<double> flat_filters() const;
    void set_flat_filters(const std::vector<double>& values);

  private:
    std::vector<double> rescale_features(const std::vector<double>& raw) const;

    CnnPipelineSpec spec_;
    std::vector<Filter> filters_;
    int feature_count_ = 0;
    int final_side_ = 0;
    int final_channels_ = 0;
    bool calibrated_ = false;
    std::vector<double> rescale_lo_;
    std::vector<double> rescale_hi_;
};

} // namespace c4vqc
