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

#include "c4vqc/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "c4vqc/errors.hpp"

namespace c4vqc {

using nlohmann::json;

namespace {

std::uint64_t require_seed(const json& j, const char* key, const char* section) {
    if (!j.contains(key)) {
        throw ValidationError(std::string(section) + ": seed field '" + key + "' must be explicit");
    }
    return j.at(key).get<std::uint64_t>();
}

} // namespace

ExperimentConfig parse_experiment_config(const json& j) {
    ExperimentConfig cfg;
    if (j.contains("dataset")) {
        const json& d = j.at("dataset");
        cfg.dataset.source = d.value("source", "tetrominoes");
        cfg.dataset.n = d.value("n", 4);
        cfg.dataset.upscale_factor = d.value("upscale", 1);
        cfg.dataset.noise_sigma = d.value("noise_sigma", 25.0);
        cfg.dataset.noise_copies = d.value("noise_copies", 0);
        if (cfg.dataset.noise_copies > 0) {
            cfg.dataset.noise_seed = require_seed(d, "noise_seed", "dataset");
        }
        cfg.dataset.rotation_augment = d.value("rotation_augment", false);
        cfg.dataset.path = d.value("path", "");
        cfg.dataset.format = d.value("format", "png");
        cfg.dataset.target_side = d.value("target_side", 16);
        cfg.dataset.grayscale = d.value("grayscale", true);
        cfg.dataset.manifest_path = d.value("manifest", "");
        cfg.dataset.split_ratio = d.value("split_ratio", 1.0 / 3.0);
        cfg.dataset.split_seed = require_seed(d, "split_seed", "dataset");
    }
    if (j.contains("model")) {
        cfg.model = model_spec_from_json(j.at("model"));
    }
    if (j.contains("cnn_pipeline")) {
        cfg.cnn = cnn_spec_from_json(j.at("cnn_pipeline"));
        cfg.cnn_seed = require_seed(j.at("cnn_pipeline"), "seed", "cnn_pipeline");
    }
    if (j.contains("train")) {
        const json& t = j.at("train");
        cfg.train.learning_rate = t.value("learning_rate", 0.1);
        cfg.train.max_epochs = t.value("max_epochs", 100);
        cfg.train.batch_size = t.value("batch_size", 0);
        cfg.train.seed = require_seed(t, "seed", "train");
        cfg.train.init_low = t.value("init_low", 0.0);
        cfg.train.init_high = t.value("init_high", 6.283185307179586);
        cfg.train.record_test_metrics = t.value("record_test_metrics", false);
        const std::string prec = t.value("precision", "float32");
        if (prec == "float32") {
            cfg.train.precision = Precision::Float32;
        } else if (prec == "float64") {
            cfg.train.precision = Precision::Float64;
        } else {
            throw ValidationError("train.precision must be float32 or float64");
        }
        cfg.train.validate();
    }
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        SweepConfig sweep;
        for (const auto& a : s.at("architectures")) {
            sweep.architectures.push_back(architecture_from_name(a.get<std::string>()));
        }
        sweep.n_layers_values = s.at("n_layers").get<std::vector<int>>();
        sweep.seeds = s.at("seeds").get<std::vector<std::uint64_t>>();
        sweep.workers = s.value("workers", 1);
        if (sweep.architectures.empty() || sweep.n_layers_values.empty() || sweep.seeds.empty()) {
            throw ValidationError("sweep: architectures, n_layers and seeds must be nonempty");
        }
        cfg.sweep = sweep;
    }
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    json j = json::parse(read_text(path), nullptr, false);
    if (j.is_discarded()) {
        throw ValidationError("malformed JSON config: " + path);
    }
    return parse_experiment_config(j);
}

Dataset build_dataset(const DatasetConfig& cfg) {
    Dataset d;
    if (cfg.source == "tetrominoes") {
        d = gen_tetrominoes(cfg.n);
        if (cfg.noise_copies > 0) {
            d = augment_noise(d, cfg.noise_sigma, cfg.noise_copies, cfg.noise_seed);
        }
        if (cfg.rotation_augment) {
            d = augment_rotations(d);
        }
        if (cfg.upscale_factor > 1) {
            d = upscale(d, cfg.upscale_factor);
        }
    } else if (cfg.source == "images") {
        const ImageFormat fmt = cfg.format == "raw" ? ImageFormat::Raw : ImageFormat::Png;
        d = load_images(cfg.path, fmt, cfg.target_side, cfg.grayscale);
        if (cfg.rotation_augment) {
            d = augment_rotations(d);
        }
    } else if (cfg.source == "manifest") {
        const DatasetManifest manifest = load_manifest(cfg.manifest_path);
        auto images = read_raw(manifest.raw_path);
        if (images.size() != manifest.labels.size()) {
            throw ValidationError("manifest labels do not match raw image count");
        }
        for (std::size_t k = 0; k < images.size(); ++k) {
            images[k].label = manifest.labels[k];
            images[k].augmented = k < manifest.augmented.size() && manifest.augmented[k];
            d.items.push_back(std::move(images[k]));
        }
    } else {
        throw ValidationError("unknown dataset source '" + cfg.source + "'");
    }
    d.require_trainable();
    return d;
}

std::pair<Dataset, Dataset> split_dataset(const DatasetConfig& cfg, const Dataset& d) {
    return split(d, cfg.split_ratio, cfg.split_seed);
}

NumericDataset to_numeric(const Dataset& d) {
    NumericDataset out;
    for (const auto& im : d.items) {
        out.features.push_back(scale_features(im));
        out.labels.push_back(im.label);
    }
    return out;
}

json run_record_to_json(const RunRecord& r) {
    json j;
    j["model"] = model_spec_to_json(r.spec);
    j["seed"] = r.seed;
    j["status"] = r.status;
    j["final_loss"] = r.final_loss;
    j["train_metrics"] = metrics_to_json(r.train_metrics);
    j["test_metrics"] = metrics_to_json(r.test_metrics);
    j["wall_seconds"] = r.wall_seconds;
    j["history"] = history_to_json(r.history);
    return j;
}

namespace {

MetricsReport metrics_from_json(const json& j) {
    MetricsReport m;
    m.accuracy = j.at("accuracy").get<double>();
    m.precision = j.at("precision").get<double>();
    m.recall = j.at("recall").get<double>();
    m.f1 = j.at("f1").get<double>();
    m.tp = j.at("tp").get<long>();
    m.fp = j.at("fp").get<long>();
    m.tn = j.at("tn").get<long>();
    m.fn = j.at("fn").get<long>();
    m.precision_defined = j.value("precision_defined", true);
    m.recall_defined = j.value("recall_defined", true);
    m.f1_defined = j.value("f1_defined", true);
    return m;
}

} // namespace

RunRecord run_record_from_json(const json& j) {
    RunRecord r;
    r.spec = model_spec_from_json(j.at("model"));
    r.seed = j.at("seed").get<std::uint64_t>();
    r.status = j.at("status").get<std::string>();
    r.final_loss = j.at("final_loss").get<double>();
    r.train_metrics = metrics_from_json(j.at("train_metrics"));
    r.test_metrics = metrics_from_json(j.at("test_metrics"));
    r.wall_seconds = j.at("wall_seconds").get<double>();
    for (const auto& e : j.at("history")) {
        EpochRecord rec;
        rec.loss = e.at("loss").get<double>();
        rec.train_metrics = metrics_from_json(e.at("train"));
        if (e.contains("test")) {
            rec.test_metrics = metrics_from_json(e.at("test"));
        }
        rec.wall_seconds = e.at("wall_seconds").get<double>();
        r.history.epochs.push_back(std::move(rec));
    }
    return r;
}

RunRecord run_training(const ModelSpec& spec, const NumericDataset& train_set, const NumericDataset& test_set,
                       TrainConfig config, std::uint64_t seed) {
    RunRecord record;
    record.spec = spec;
    record.seed = seed;
    config.seed = seed;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const CircuitPlan plan = build_model(spec);
        TrainResult result = train(plan, train_set, &test_set, config);
        record.final_loss = result.history.epochs.back().loss;
        record.train_metrics = result.history.epochs.back().train_metrics;
        const auto test_outputs = evaluate_outputs(plan, result.params, test_set);
        std::vector<int> test_labels;
        for (double y : test_set.labels) {
            test_labels.push_back(y >= 0 ? 1 : -1);
        }
        record.test_metrics = compute_metrics(classify(test_outputs), test_labels);
        record.history = std::move(result.history);
        record.trained_params = std::move(result.params);
    } catch (const std::exception& e) {
        record.status = std::string("failed: ") + e.what();
    }
    record.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return record;
}

SweepResult compare_architectures(const ExperimentConfig& cfg) {
    if (!cfg.sweep.has_value()) {
        throw ValidationError("compare: config has no sweep section");
    }
    const SweepConfig& sweep = *cfg.sweep;
    const Dataset full = build_dataset(cfg.dataset);
    const auto [train_d, test_d] = split_dataset(cfg.dataset, full);
    const NumericDataset train_set = to_numeric(train_d);
    const NumericDataset test_set = to_numeric(test_d);

    ModelSpec base = cfg.model.value_or(ModelSpec{});
    SweepResult result;
    for (Architecture arch : sweep.architectures) {
        for (int n_layers : sweep.n_layers_values) {
            for (std::uint64_t seed : sweep.seeds) {
                ModelSpec spec = base;
                spec.architecture = arch;
                spec.n_layers = n_layers;
                result.records.push_back(run_training(spec, train_set, test_set, cfg.train, seed));
            }
        }
    }

    // summary: mean metrics per (architecture, n_layers) over seeds
    std::string summary = "architecture,n_layers,runs,failed,mean_final_loss,"
                          "train_f1,train_accuracy,train_precision,train_recall,"
                          "test_f1,test_accuracy,test_precision,test_recall\n";
    for (Architecture arch : sweep.architectures) {
        for (int n_layers : sweep.n_layers_values) {
            double loss = 0;
            double trf1 = 0, tra = 0, trp = 0, trr = 0, tef1 = 0, tea = 0, tep = 0, ter = 0;
            int ok = 0, failed = 0;
            for (const auto& r : result.records) {
                if (r.spec.architecture != arch || r.spec.n_layers != n_layers) {
                    continue;
                }
                if (r.status != "ok") {
                    ++failed;
                    continue;
                }
                ++ok;
                loss += r.final_loss;
                trf1 += r.train_metrics.f1;
                tra += r.train_metrics.accuracy;
                trp += r.train_metrics.precision;
                trr += r.train_metrics.recall;
                tef1 += r.test_metrics.f1;
                tea += r.test_metrics.accuracy;
                tep += r.test_metrics.precision;
                ter += r.test_metrics.recall;
            }
            const double d = ok > 0 ? static_cast<double>(ok) : 1.0;
            summary += csv_escape(architecture_name(arch)) + "," + std::to_string(n_layers) + "," +
                       std::to_string(ok) + "," + std::to_string(failed) + "," + format_double(loss / d) + "," +
                       format_double(trf1 / d) + "," + format_double(tra / d) + "," + format_double(trp / d) + "," +
                       format_double(trr / d) + "," + format_double(tef1 / d) + "," + format_double(tea / d) + "," +
                       format_double(tep / d) + "," + format_double(ter / d) + "\n";
        }
    }
    result.summary_csv = summary;

    // loss envelopes per curve: mean plus min/max band across seeds
    std::string losses = "architecture,n_layers,epoch,mean_loss,min_loss,max_loss\n";
    for (Architecture arch : sweep.architectures) {
        for (int n_layers : sweep.n_layers_values) {
            std::size_t max_epochs = 0;
            for (const auto& r : result.records) {
                if (r.spec.architecture == arch && r.spec.n_layers == n_layers && r.status == "ok") {
                    max_epochs = std::max(max_epochs, r.history.epochs.size());
                }
            }
            for (std::size_t e = 0; e < max_epochs; ++e) {
                double sum = 0, mn = 0, mx = 0;
                int count = 0;
                for (const auto& r : result.records) {
                    if (r.spec.architecture != arch || r.spec.n_layers != n_layers || r.status != "ok" ||
                        e >= r.history.epochs.size()) {
                        continue;
                    }
                    const double v = r.history.epochs[e].loss;
                    if (count == 0) {
                        mn = mx = v;
                    }
                    sum += v;
                    mn = std::min(mn, v);
                    mx = std::max(mx, v);
                    ++count;
                }
                if (count == 0) {
                    continue;
                }
                losses += csv_escape(architecture_name(arch)) + "," + std::to_string(n_layers) + "," +
                          std::to_string(e) + "," + format_double(sum / count) + "," + format_double(mn) + "," +
                          format_double(mx) + "\n";
            }
        }
    }
    result.losses_csv = losses;
    return result;
}

} // namespace c4vqc
