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

#include "c4vqc/serialization.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "c4vqc/errors.hpp"

namespace c4vqc {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out += c;
        }
    }
    out += '"';
    return out;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) {
            throw IoError("cannot open for writing: " + tmp);
        }
        out << content;
        if (!out) {
            throw IoError("write failed: " + tmp);
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw IoError("rename failed: " + tmp + " -> " + path + " (" + ec.message() + ")");
    }
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open for reading: " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

std::string axis_name(PauliAxis a) {
    switch (a) {
    case PauliAxis::X:
        return "x";
    case PauliAxis::Y:
        return "y";
    default:
        return "z";
    }
}

PauliAxis axis_from_name(const std::string& s) {
    if (s == "x") {
        return PauliAxis::X;
    }
    if (s == "y") {
        return PauliAxis::Y;
    }
    if (s == "z") {
        return PauliAxis::Z;
    }
    throw ValidationError("unknown rotation axis '" + s + "'");
}

json parse_json(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        throw ValidationError("malformed JSON in " + what);
    }
    return j;
}

} // namespace

json model_spec_to_json(const ModelSpec& spec) {
    json j;
    j["architecture"] = architecture_name(spec.architecture);
    j["n"] = spec.n;
    j["n_layers"] = spec.n_layers;
    if (spec.architecture == Architecture::NonEquivariant) {
        j["random_orbit_seed"] = spec.random_orbit_seed;
    }
    if (spec.architecture == Architecture::BasicEntangler) {
        j["rotation_axis"] = axis_name(spec.rotation_axis);
    }
    return j;
}

ModelSpec model_spec_from_json(const json& j) {
    ModelSpec spec;
    spec.architecture = architecture_from_name(j.at("architecture").get<std::string>());
    spec.n = j.at("n").get<int>();
    spec.n_layers = j.at("n_layers").get<int>();
    if (j.contains("random_orbit_seed")) {
        spec.random_orbit_seed = j.at("random_orbit_seed").get<std::uint64_t>();
    }
    if (j.contains("rotation_axis")) {
        spec.rotation_axis = axis_from_name(j.at("rotation_axis").get<std::string>());
    }
    spec.validate();
    return spec;
}

json metrics_to_json(const MetricsReport& m) {
    json j;
    j["accuracy"] = m.accuracy;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f1"] = m.f1;
    j["tp"] = m.tp;
    j["fp"] = m.fp;
    j["tn"] = m.tn;
    j["fn"] = m.fn;
    j["precision_defined"] = m.precision_defined;
    j["recall_defined"] = m.recall_defined;
    j["f1_defined"] = m.f1_defined;
    return j;
}

json cnn_spec_to_json(const CnnPipelineSpec& spec) {
    json j;
    j["input_side"] = spec.input_side;
    j["input_channels"] = spec.input_channels;
    json nw = json::array(), nc = json::array(), np = json::array();
    for (const auto& layer : spec.layers) {
        nw.push_back(layer.n_w);
        nc.push_back(layer.c_out);
        np.push_back(layer.pool);
    }
    j["n_w"] = nw;
    j["n_c"] = nc;
    j["n_p"] = np;
    j["relu"] = spec.relu_after_conv;
    j["rescale_max"] = spec.rescale_max;
    return j;
}

CnnPipelineSpec cnn_spec_from_json(const json& j) {
    CnnPipelineSpec spec;
    spec.input_side = j.at("input_side").get<int>();
    spec.input_channels = j.value("input_channels", 1);
    const auto nw = j.at("n_w").get<std::vector<int>>();
    const auto nc = j.at("n_c").get<std::vector<int>>();
    std::vector<int> np = j.contains("n_p") && !j.at("n_p").is_null() ? j.at("n_p").get<std::vector<int>>()
                                                                      : std::vector<int>(nw.size(), 0);
    if (nw.size() != nc.size() || (np.size() != nw.size() && !np.empty())) {
        throw ValidationError("cnn_pipeline: n_w, n_c and n_p must have equal lengths");
    }
    if (np.empty()) {
        np.assign(nw.size(), 0);
    }
    for (std::size_t l = 0; l < nw.size(); ++l) {
        spec.layers.push_back({nw[l], nc[l], np[l]});
    }
    spec.relu_after_conv = j.value("relu", true);
    spec.rescale_max = j.value("rescale_max", 1.0);
    return spec;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    json j;
    j["format_version"] = 1;
    j["model"] = model_spec_to_json(ckpt.spec);
    j["params"] = ckpt.params.values;
    if (ckpt.cnn_spec.has_value()) {
        json c;
        c["spec"] = cnn_spec_to_json(*ckpt.cnn_spec);
        c["filters"] = ckpt.cnn_filters;
        c["rescale_lo"] = ckpt.cnn_rescale_lo;
        c["rescale_hi"] = ckpt.cnn_rescale_hi;
        c["calibrated"] = ckpt.cnn_calibrated;
        j["cnn"] = c;
    }
    write_text_atomic(path, j.dump(2) + "\n");
}

Checkpoint load_checkpoint(const std::string& path) {
    const json j = parse_json(read_text(path), path);
    if (j.value("format_version", 0) != 1) {
        throw ValidationError("checkpoint " + path + ": unsupported format_version");
    }
    Checkpoint ckpt;
    ckpt.spec = model_spec_from_json(j.at("model"));
    ckpt.params.values = j.at("params").get<std::vector<double>>();
    if (j.contains("cnn")) {
        const json& c = j.at("cnn");
        ckpt.cnn_spec = cnn_spec_from_json(c.at("spec"));
        ckpt.cnn_filters = c.at("filters").get<std::vector<double>>();
        ckpt.cnn_rescale_lo = c.at("rescale_lo").get<std::vector<double>>();
        ckpt.cnn_rescale_hi = c.at("rescale_hi").get<std::vector<double>>();
        ckpt.cnn_calibrated = c.value("calibrated", false);
    }
    return ckpt;
}

Checkpoint checkpoint_of(const ModelSpec& spec, const ModelParams& params) {
    Checkpoint c;
    c.spec = spec;
    c.params = params;
    return c;
}

Checkpoint checkpoint_of(const HybridModel& model) {
    Checkpoint c;
    c.spec = model.quantum_spec;
    c.params = model.quantum_params;
    c.cnn_spec = model.cnn.spec();
    c.cnn_filters = model.cnn.flat_filters();
    c.cnn_rescale_lo = model.cnn.rescale_lo();
    c.cnn_rescale_hi = model.cnn.rescale_hi();
    c.cnn_calibrated = model.cnn.calibrated();
    return c;
}

HybridModel hybrid_from_checkpoint(const Checkpoint& ckpt) {
    if (!ckpt.cnn_spec.has_value()) {
        throw ValidationError("checkpoint holds no cnn section");
    }
    HybridModel model = make_hybrid(*ckpt.cnn_spec, 0, ckpt.spec);
    model.cnn.set_flat_filters(ckpt.cnn_filters);
    if (ckpt.cnn_calibrated) {
        model.cnn.set_rescale(ckpt.cnn_rescale_lo, ckpt.cnn_rescale_hi);
    }
    model.quantum_params = ckpt.params;
    return model;
}

std::string history_to_csv(const TrainHistory& history) {
    std::string out = "epoch,loss,train_accuracy,train_precision,train_recall,train_f1,"
                      "test_accuracy,test_precision,test_recall,test_f1,wall_seconds\n";
    for (std::size_t e = 0; e < history.epochs.size(); ++e) {
        const auto& rec = history.epochs[e];
        out += std::to_string(e) + "," + format_double(rec.loss);
        out += "," + format_double(rec.train_metrics.accuracy) + "," + format_double(rec.train_metrics.precision) +
               "," + format_double(rec.train_metrics.recall) + "," + format_double(rec.train_metrics.f1);
        if (rec.test_metrics.has_value()) {
            out += "," + format_double(rec.test_metrics->accuracy) + "," + format_double(rec.test_metrics->precision) +
                   "," + format_double(rec.test_metrics->recall) + "," + format_double(rec.test_metrics->f1);
        } else {
            out += ",,,,";
        }
        out += "," + format_double(rec.wall_seconds) + "\n";
    }
    return out;
}

json history_to_json(const TrainHistory& history) {
    json arr = json::array();
    for (std::size_t e = 0; e < history.epochs.size(); ++e) {
        const auto& rec = history.epochs[e];
        json j;
        j["epoch"] = e;
        j["loss"] = rec.loss;
        j["train"] = metrics_to_json(rec.train_metrics);
        if (rec.test_metrics.has_value()) {
            j["test"] = metrics_to_json(*rec.test_metrics);
        }
        j["wall_seconds"] = rec.wall_seconds;
        arr.push_back(j);
    }
    return arr;
}

json orbit_table_to_json(const OrbitTable& table) {
    json j;
    j["n"] = table.n;
    json orbits = json::array();
    for (const auto& orbit : table.orbits) {
        json members = json::array();
        for (const auto& p : orbit) {
            members.push_back({{"i", p.i}, {"j", p.j}, {"qubit", qubit_of(p, table.n)}});
        }
        orbits.push_back(members);
    }
    j["orbits"] = orbits;
    json cells = json::array();
    for (const auto& cell : table.cells) {
        json members = json::array();
        for (const auto& p : cell) {
            members.push_back({{"i", p.i}, {"j", p.j}, {"qubit", qubit_of(p, table.n)}});
        }
        cells.push_back(members);
    }
    j["cells"] = cells;
    return j;
}

json landscape_to_json(const LandscapeStats& stats) {
    json j;
    j["mean_loss"] = stats.mean_loss;
    j["var_loss"] = stats.var_loss;
    j["mean_grad"] = stats.mean_grad;
    j["var_grad"] = stats.var_grad;
    j["n_samples"] = stats.n_samples;
    return j;
}

void save_manifest(const std::string& path, const DatasetManifest& manifest) {
    json j;
    j["format_version"] = 1;
    j["raw_path"] = manifest.raw_path;
    j["side"] = manifest.side;
    j["channels"] = manifest.channels;
    j["labels"] = manifest.labels;
    j["augmented"] = manifest.augmented;
    j["provenance"] = manifest.provenance;
    write_text_atomic(path, j.dump(2) + "\n");
}

DatasetManifest load_manifest(const std::string& path) {
    const json j = parse_json(read_text(path), path);
    DatasetManifest m;
    m.raw_path = j.at("raw_path").get<std::string>();
    m.side = j.at("side").get<int>();
    m.channels = j.at("channels").get<int>();
    m.labels = j.at("labels").get<std::vector<int>>();
    m.augmented = j.at("augmented").get<std::vector<bool>>();
    m.provenance = j.value("provenance", json::object());
    return m;
}

} // namespace c4vqc
