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

#include "c4vqc/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "c4vqc/errors.hpp"
#include "c4vqc/symmetry.hpp"

namespace c4vqc {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Cell {
    int i, j;
};

// base shapes before placement; L keeps its chirality so reflections change
// the label
const std::vector<Cell> kShapeT = {{0, 0}, {0, 1}, {0, 2}, {1, 1}};
const std::vector<Cell> kShapeL = {{0, 0}, {1, 0}, {2, 0}, {2, 1}};

std::vector<Cell> rotate_cells(const std::vector<Cell>& cells) {
    // rotate within the bounding box, then renormalize to the origin
    int max_i = 0;
    for (const auto& c : cells) {
        max_i = std::max(max_i, c.i);
    }
    std::vector<Cell> out;
    out.reserve(cells.size());
    for (const auto& c : cells) {
        out.push_back({c.j, max_i - c.i});
    }
    int min_i = out[0].i, min_j = out[0].j;
    for (const auto& c : out) {
        min_i = std::min(min_i, c.i);
        min_j = std::min(min_j, c.j);
    }
    for (auto& c : out) {
        c.i -= min_i;
        c.j -= min_j;
    }
    return out;
}

} // namespace

void Dataset::require_trainable() const {
    if (items.empty()) {
        throw ValidationError("dataset is empty");
    }
    bool pos = false, neg = false;
    for (const auto& im : items) {
        pos = pos || im.label > 0;
        neg = neg || im.label < 0;
    }
    if (!pos || !neg) {
        throw ValidationError("dataset must contain both classes");
    }
}

Dataset gen_tetrominoes(int n) {
    if (n < 4) {
        throw ValidationError("gen_tetrominoes: grid of side " + std::to_string(n) +
                              " cannot hold all tetromino orientations (need n >= 4)");
    }
    Dataset d;
    for (const auto& [shape, label] : {std::pair{kShapeT, 1}, std::pair{kShapeL, -1}}) {
        std::vector<Cell> cells = shape;
        for (int orientation = 0; orientation < 4; ++orientation) {
            int max_i = 0, max_j = 0;
            for (const auto& c : cells) {
                max_i = std::max(max_i, c.i);
                max_j = std::max(max_j, c.j);
            }
            for (int di = 0; di + max_i < n; ++di) {
                for (int dj = 0; dj + max_j < n; ++dj) {
                    LabeledImage im;
                    im.side = n;
                    im.pixels.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
                    for (const auto& c : cells) {
                        im.pixels[static_cast<std::size_t>((c.i + di) * n + (c.j + dj))] = 255.0;
                    }
                    im.label = label;
                    d.items.push_back(std::move(im));
                }
            }
            cells = rotate_cells(cells);
        }
    }
    return d;
}

Dataset augment_noise(const Dataset& d, double sigma, int copies, std::uint64_t seed) {
    if (sigma < 0.0) {
        throw ValidationError("augment_noise: sigma must be >= 0");
    }
    Dataset out = d;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    for (const auto& im : d.items) {
        for (int c = 0; c < copies; ++c) {
            LabeledImage noisy = im;
            noisy.augmented = true;
            if (sigma > 0.0) {
                for (auto& p : noisy.pixels) {
                    p = std::clamp(p + gauss(rng), 0.0, 255.0);
                }
            }
            out.items.push_back(std::move(noisy));
        }
    }
    return out;
}

Dataset augment_rotations(const Dataset& d) {
    Dataset out = d;
    auto exists = [&out](const LabeledImage& candidate) {
        for (const auto& im : out.items) {
            if (im.side == candidate.side && im.channels == candidate.channels && im.pixels == candidate.pixels) {
                return true;
            }
        }
        return false;
    };
    for (const auto& im : d.items) {
        if (im.channels != 1 && im.side * im.side * im.channels != static_cast<int>(im.pixels.size())) {
            throw ValidationError("augment_rotations: malformed image");
        }
        for (int t = 1; t < 4; ++t) {
            LabeledImage rot = im;
            rot.augmented = true;
            if (im.channels == 1) {
                rot.pixels = rotate_image(im.pixels, im.side, t);
            } else {
                // rotate each channel plane
                rot.pixels.assign(im.pixels.size(), 0.0);
                for (int c = 0; c < im.channels; ++c) {
                    std::vector<double> plane(static_cast<std::size_t>(im.side) * im.side);
                    for (int i = 0; i < im.side; ++i) {
                        for (int j = 0; j < im.side; ++j) {
                            plane[static_cast<std::size_t>(i * im.side + j)] = im.at(i, j, c);
                        }
                    }
                    plane = rotate_image(plane, im.side, t);
                    for (int i = 0; i < im.side; ++i) {
                        for (int j = 0; j < im.side; ++j) {
                            rot.pixels[static_cast<std::size_t>((i * im.side + j) * im.channels + c)] =
                                plane[static_cast<std::size_t>(i * im.side + j)];
                        }
                    }
                }
            }
            if (!exists(rot)) {
                out.items.push_back(std::move(rot));
            }
        }
    }
    return out;
}

Dataset upscale(const Dataset& d, int factor) {
    if (factor < 1) {
        throw ValidationError("upscale: factor must be >= 1");
    }
    if (factor == 1) {
        return d;
    }
    Dataset out;
    out.class_names = d.class_names;
    for (const auto& im : d.items) {
        LabeledImage big;
        big.side = im.side * factor;
        big.channels = im.channels;
        big.label = im.label;
        big.augmented = im.augmented;
        big.pixels.assign(static_cast<std::size_t>(big.side) * big.side * big.channels, 0.0);
        for (int i = 0; i < big.side; ++i) {
            for (int j = 0; j < big.side; ++j) {
                for (int c = 0; c < big.channels; ++c) {
                    big.pixels[static_cast<std::size_t>((i * big.side + j) * big.channels + c)] =
                        im.at(i / factor, j / factor, c);
                }
            }
        }
        out.items.push_back(std::move(big));
    }
    return out;
}

std::vector<double> scale_features(const LabeledImage& img) {
    if (img.channels != 1) {
        throw ValidationError("scale_features: single-channel images only");
    }
    std::vector<double> out(img.pixels.size());
    for (std::size_t k = 0; k < img.pixels.size(); ++k) {
        out[k] = kPi * (2.0 * img.pixels[k] / 255.0 - 1.0);
    }
    return out;
}

std::pair<Dataset, Dataset> split(const Dataset& d, double test_ratio, std::uint64_t seed) {
    if (test_ratio <= 0.0 || test_ratio >= 1.0) {
        throw ValidationError("split: test_ratio must lie in (0, 1)");
    }
    d.require_trainable();
    std::mt19937_64 rng(seed);
    Dataset train, test;
    train.class_names = d.class_names;
    test.class_names = d.class_names;
    for (int label : {1, -1}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < d.items.size(); ++i) {
            if (d.items[i].label == label) {
                idx.push_back(i);
            }
        }
        std::shuffle(idx.begin(), idx.end(), rng);
        auto n_test = static_cast<std::size_t>(std::llround(test_ratio * static_cast<double>(idx.size())));
        n_test = std::clamp<std::size_t>(n_test, 1, idx.size() - 1); // both splits keep the class
        for (std::size_t k = 0; k < idx.size(); ++k) {
            (k < n_test ? test : train).items.push_back(d.items[idx[k]]);
        }
    }
    return {std::move(train), std::move(test)};
}

std::pair<Tensor4, std::vector<double>> to_tensor(const Dataset& d) {
    if (d.items.empty()) {
        throw ValidationError("to_tensor: empty dataset");
    }
    const int side = d.items.front().side;
    const int channels = d.items.front().channels;
    Tensor4 x(static_cast<int>(d.items.size()), side, side, channels);
    std::vector<double> labels;
    labels.reserve(d.items.size());
    for (std::size_t s = 0; s < d.items.size(); ++s) {
        const auto& im = d.items[s];
        if (im.side != side || im.channels != channels) {
            throw ValidationError("to_tensor: inhomogeneous image shapes");
        }
        for (int i = 0; i < side; ++i) {
            for (int j = 0; j < side; ++j) {
                for (int c = 0; c < channels; ++c) {
                    x.at(static_cast<int>(s), i, j, c) = im.at(i, j, c) / 255.0;
                }
            }
        }
        labels.push_back(im.label);
    }
    return {std::move(x), std::move(labels)};
}

void write_raw(const std::string& path, const std::vector<LabeledImage>& images) {
    if (images.empty()) {
        throw ValidationError("write_raw: no images");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("write_raw: cannot open " + path);
    }
    const std::uint32_t side = static_cast<std::uint32_t>(images.front().side);
    const std::uint32_t channels = static_cast<std::uint32_t>(images.front().channels);
    const std::uint32_t count = static_cast<std::uint32_t>(images.size());
    out.write(reinterpret_cast<const char*>(&side), 4);
    out.write(reinterpret_cast<const char*>(&channels), 4);
    out.write(reinterpret_cast<const char*>(&count), 4);
    for (const auto& im : images) {
        if (static_cast<std::uint32_t>(im.side) != side || static_cast<std::uint32_t>(im.channels) != channels) {
            throw ValidationError("write_raw: inhomogeneous image shapes");
        }
        out.write(reinterpret_cast<const char*>(im.pixels.data()),
                  static_cast<std::streamsize>(im.pixels.size() * sizeof(double)));
    }
    if (!out) {
        throw IoError("write_raw: write failed for " + path);
    }
}

std::vector<LabeledImage> read_raw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("read_raw: cannot open " + path);
    }
    std::uint32_t side = 0, channels = 0, count = 0;
    in.read(reinterpret_cast<char*>(&side), 4);
    in.read(reinterpret_cast<char*>(&channels), 4);
    in.read(reinterpret_cast<char*>(&count), 4);
    if (!in || side == 0 || channels == 0) {
        throw IoError("read_raw: malformed header in " + path);
    }
    std::vector<LabeledImage> images;
    images.reserve(count);
    const std::size_t values = static_cast<std::size_t>(side) * side * channels;
    for (std::uint32_t k = 0; k < count; ++k) {
        LabeledImage im;
        im.side = static_cast<int>(side);
        im.channels = static_cast<int>(channels);
        im.pixels.resize(values);
        in.read(reinterpret_cast<char*>(im.pixels.data()), static_cast<std::streamsize>(values * sizeof(double)));
        if (!in) {
            throw IoError("read_raw: truncated data in " + path);
        }
        images.push_back(std::move(im));
    }
    return images;
}

std::vector<double> crop_and_downscale(const DecodedImage& img, int target_side, bool grayscale, int* out_channels) {
    if (target_side < 1) {
        throw ValidationError("crop_and_downscale: target side must be >= 1");
    }
    const int crop = std::min(img.width, img.height);
    const int off_i = (img.height - crop) / 2;
    const int off_j = (img.width - crop) / 2;
    const int channels = grayscale ? 1 : img.channels;
    if (out_channels != nullptr) {
        *out_channels = channels;
    }
    std::vector<double> out(static_cast<std::size_t>(target_side) * target_side * channels, 0.0);
    for (int i = 0; i < target_side; ++i) {
        const int i0 = off_i + i * crop / target_side;
        const int i1 = std::max(i0 + 1, off_i + (i + 1) * crop / target_side);
        for (int j = 0; j < target_side; ++j) {
            const int j0 = off_j + j * crop / target_side;
            const int j1 = std::max(j0 + 1, off_j + (j + 1) * crop / target_side);
            for (int c = 0; c < channels; ++c) {
                double acc = 0.0;
                long cnt = 0;
                for (int a = i0; a < i1; ++a) {
                    for (int b = j0; b < j1; ++b) {
                        if (grayscale) {
                            double s = 0.0;
                            for (int cc = 0; cc < img.channels; ++cc) {
                                s += img.pixels[static_cast<std::size_t>((a * img.width + b) * img.channels + cc)];
                            }
                            acc += s / img.channels;
                        } else {
                            acc += img.pixels[static_cast<std::size_t>((a * img.width + b) * img.channels + c)];
                        }
                        ++cnt;
                    }
                }
                out[static_cast<std::size_t>((i * target_side + j) * channels + c)] = acc / static_cast<double>(cnt);
            }
        }
    }
    return out;
}

Dataset load_images(const std::string& root, ImageFormat format, int target_side, bool grayscale) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) {
        throw IoError("load_images: not a directory: " + root);
    }
    std::vector<std::string> class_dirs;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory()) {
            class_dirs.push_back(entry.path().string());
        }
    }
    std::sort(class_dirs.begin(), class_dirs.end());
    if (class_dirs.size() != 2) {
        throw ValidationError("load_images: expected exactly 2 class directories under " + root + ", found " +
                              std::to_string(class_dirs.size()));
    }

    Dataset d;
    d.class_names.clear();
    std::vector<std::string> missing;
    const int labels[2] = {1, -1};
    for (int cls = 0; cls < 2; ++cls) {
        d.class_names[labels[cls]] = fs::path(class_dirs[static_cast<std::size_t>(cls)]).filename().string();
        std::vector<std::string> files;
        for (const auto& entry : fs::directory_iterator(class_dirs[static_cast<std::size_t>(cls)])) {
            if (entry.is_regular_file()) {
                files.push_back(entry.path().string());
            }
        }
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            try {
                if (format == ImageFormat::Png) {
                    const DecodedImage img = read_png(file);
                    LabeledImage im;
                    im.side = target_side;
                    im.pixels = crop_and_downscale(img, target_side, grayscale, &im.channels);
                    im.label = labels[cls];
                    d.items.push_back(std::move(im));
                } else {
                    for (auto& im : read_raw(file)) {
                        DecodedImage dec;
                        dec.width = im.side;
                        dec.height = im.side;
                        dec.channels = im.channels;
                        dec.pixels = std::move(im.pixels);
                        LabeledImage out;
                        out.side = target_side;
                        out.pixels = crop_and_downscale(dec, target_side, grayscale, &out.channels);
                        out.label = labels[cls];
                        d.items.push_back(std::move(out));
                    }
                }
            } catch (const IoError&) {
                missing.push_back(file);
            }
        }
    }
    if (!missing.empty()) {
        std::string joined;
        for (const auto& m : missing) {
            joined += (joined.empty() ? "" : ", ") + m;
        }
        throw IoError("load_images: unreadable files: " + joined);
    }
    if (d.items.empty()) {
        throw ValidationError("load_images: no images found under " + root);
    }
    return d;
}

} // namespace c4vqc
