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
 * Tetromino dataset synthesis, augmentation, feature scaling, splits, and
 * external image ingestion (PNG and a small raw tensor format).
 *
 * Labels: +1 = T, -1 = L. Pixels are grayscale doubles in [0, 255].
 */

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "c4vqc/cnn.hpp"

namespace c4vqc {

struct LabeledImage {
    int side = 0;
    int channels = 1;
    std::vector<double> pixels; // row-major (i, j, channel), values in [0, 255]
    int label = 1;              // +1 or -1
    bool augmented = false;

    double at(int i, int j, int c = 0) const {
        return pixels[static_cast<std::size_t>((i * side + j) * channels + c)];
    }
};

struct Dataset {
    std::vector<LabeledImage> items;
    std::map<int, std::string> class_names = {{1, "T"}, {-1, "L"}};

    std::size_t size() const { return items.size(); }
    void require_trainable() const; // nonempty, both classes present
};

/// Every placement of the T (+1) and L (-1) tetromino: all four orientations
/// at every translation inside the n x n grid. Foreground 255, background 0.
/// n=4 yields 24 images per class.
Dataset gen_tetrominoes(int n = 4);

/// Appends `copies` noisy variants per image: pixel + Gaussian(0, sigma),
/// clipped to [0, 255]. Deterministic per seed.
Dataset augment_noise(const Dataset& d, double sigma, int copies, std::uint64_t seed);

/// Appends the three nontrivial rotations of each image, skipping exact
/// pixel duplicates of anything already present.
Dataset augment_rotations(const Dataset& d);

/// Nearest-neighbor upscale by an integer factor (each pixel becomes an
/// f x f block); used to feed small synthetic shapes into the CNN front-end.
Dataset upscale(const Dataset& d, int factor);

/// x_k = pi * (2 p_k / 255 - 1), flattened k = i*n + j. Single-channel only.
std::vector<double> scale_features(const LabeledImage& img);

/// Seeded stratified split; test_ratio is the test fraction.
std::pair<Dataset, Dataset> split(const Dataset& d, double test_ratio, std::uint64_t seed);

/// Batched single- or multi-channel tensor of the images, pixel values
/// scaled to [0, 1] for the CNN front-end, plus +-1 labels.
std::pair<Tensor4, std::vector<double>> to_tensor(const Dataset& d);

enum class ImageFormat { Png, Raw };

/// Loads a two-class directory tree: <root>/<class_a>/..., <root>/<class_b>/...
/// Class directories sorted by name map to labels +1 and -1 in that order.
/// Images are decoded, optionally converted to grayscale (channel mean),
/// center-cropped square and box-filter downscaled to target_side.
Dataset load_images(const std::string& root, ImageFormat format, int target_side, bool grayscale);

/// Raw tensor format: little-endian u32 side, u32 channels, u32 count, then
/// count*side*side*channels float64 values.
void write_raw(const std::string& path, const std::vector<LabeledImage>& images);
std::vector<LabeledImage> read_raw(const std::string& path);

// PNG support (8-bit grayscale/RGB/RGBA), see png_io.cpp
struct DecodedImage {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<double> pixels; // row-major (i, j, channel), [0, 255]
};
DecodedImage read_png(const std::string& path);
void write_png(const std::string& path, const DecodedImage& img);

/// Box-filter downscale to target side after a center crop to square.
std::vector<double> crop_and_downscale(const DecodedImage& img, int target_side, bool grayscale, int* out_channels);

} // namespace c4vqc
