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

// c4vqc command line: dataset synthesis, symmetry verification, training,
// evaluation, landscape statistics, architecture sweeps and CNN shape
// calculation. One JSON config document drives every subcommand.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "c4vqc/errors.hpp"
#include "c4vqc/experiments.hpp"
#include "c4vqc/hybrid.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace c4vqc;

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create directory " + dir + ": " + ec.message());
    }
}

void emit(const std::string& out_path, const json& j) {
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_text_atomic(out_path, text);
    }
}

int cmd_generate_data(const std::string& config_path, const std::string& out_dir) {
    const ExperimentConfig cfg = load_experiment_config(config_path);
    const Dataset d = build_dataset(cfg.dataset);
    ensure_dir(out_dir);
    const std::string raw_path = (fs::path(out_dir) / "dataset.raw").string();
    write_raw(raw_path, d.items);
    DatasetManifest manifest;
    manifest.raw_path = raw_path;
    manifest.side = d.items.front().side;
    manifest.channels = d.items.front().channels;
    for (const auto& im : d.items) {
        manifest.labels.push_back(im.label);
        manifest.augmented.push_back(im.augmented);
    }
    manifest.provenance = {{"source", cfg.dataset.source},
                           {"n", cfg.dataset.n},
                           {"noise_sigma", cfg.dataset.noise_sigma},
                           {"noise_copies", cfg.dataset.noise_copies},
                           {"noise_seed", cfg.dataset.noise_seed},
                           {"rotation_augment", cfg.dataset.rotation_augment},
                           {"upscale", cfg.dataset.upscale_factor}};
    save_manifest((fs::path(out_dir) / "manifest.json").string(), manifest);
    std::cout << "wrote " << d.items.size() << " images to " << raw_path << "\n";
    return 0;
}

int cmd_verify_symmetry(int n, int n_layers, std::uint64_t seed, const std::string& out_path) {
    const OrbitTable table = compute_orbits(n);
    const GroupRep rep = build_group_rep(n);

    json j;
    j["orbit_table"] = orbit_table_to_json(table);

    // group laws
    bool ug4_identity = true;
    bool ug3_inverse = true;
    for (int q = 0; q < rep.n_qubits; ++q) {
        int x = q;
        for (int t = 0; t < 4; ++t) {
            x = rep.element(1)[static_cast<std::size_t>(x)];
        }
        ug4_identity = ug4_identity && x == q;
        ug3_inverse =
            ug3_inverse && rep.element(3)[static_cast<std::size_t>(rep.element(1)[static_cast<std::size_t>(q)])] == q;
    }
    j["group"] = {{"ug4_is_identity", ug4_identity}, {"ug3_is_inverse", ug3_inverse}};

    // equivariant block at random angles
    ModelSpec spec;
    spec.architecture = Architecture::Equivariant;
    spec.n = n;
    spec.n_layers = n_layers;
    const CircuitPlan plan = build_model(spec);
    const ModelParams params = init_params(plan, seed, 0.0, 6.283185307179586);
    std::vector<double> zeros(static_cast<std::size_t>(plan.n_inputs), 0.0);
    const auto bound = bind_angles(plan.gates, params.values, zeros);
    const auto report = verify_equivariance(bound, rep);
    j["equivariant_block"] = {{"equivariant", report.equivariant}, {"max_deviation", report.max_deviation},
                              {"n_layers", n_layers}, {"param_seed", seed}};
    emit(out_path, j);
    return report.equivariant && ug4_identity && ug3_inverse ? 0 : 1;
}

json final_metrics_json(const RunRecord& record) {
    json j;
    j["status"] = record.status;
    j["final_loss"] = record.final_loss;
    j["train"] = metrics_to_json(record.train_metrics);
    j["test"] = metrics_to_json(record.test_metrics);
    j["wall_seconds"] = record.wall_seconds;
    return j;
}

int cmd_train(const std::string& config_path, const std::string& out_dir) {
    const ExperimentConfig cfg = load_experiment_config(config_path);
    if (!cfg.model.has_value()) {
        throw ValidationError("train: config needs a model section");
    }
    ensure_dir(out_dir);
    const Dataset full = build_dataset(cfg.dataset);
    const auto [train_d, test_d] = split_dataset(cfg.dataset, full);

    if (cfg.cnn.has_value()) {
        HybridModel model = make_hybrid(*cfg.cnn, cfg.cnn_seed, *cfg.model);
        const auto [x_train, y_train] = to_tensor(train_d);
        const auto [x_test, y_test] = to_tensor(test_d);
        const auto result = train_hybrid(model, x_train, y_train, &x_test, &y_test, cfg.train);

        const auto train_outputs = hybrid_forward(model, x_train);
        const auto test_outputs = hybrid_forward(model, x_test);
        std::vector<int> ytr, yte;
        for (double y : y_train) {
            ytr.push_back(y >= 0 ? 1 : -1);
        }
        for (double y : y_test) {
            yte.push_back(y >= 0 ? 1 : -1);
        }
        json metrics;
        metrics["final_loss"] = result.history.epochs.back().loss;
        metrics["train"] = metrics_to_json(compute_metrics(classify(train_outputs), ytr));
        metrics["test"] = metrics_to_json(compute_metrics(classify(test_outputs), yte));
        save_checkpoint((fs::path(out_dir) / "checkpoint.json").string(), checkpoint_of(model));
        write_text_atomic((fs::path(out_dir) / "history.csv").string(), history_to_csv(result.history));
        emit((fs::path(out_dir) / "metrics.json").string(), metrics);
        std::cout << "hybrid training done; test accuracy "
                  << format_double(metrics["test"]["accuracy"].get<double>()) << "\n";
        return 0;
    }

    const NumericDataset train_set = to_numeric(train_d);
    const NumericDataset test_set = to_numeric(test_d);
    const RunRecord record = run_training(*cfg.model, train_set, test_set, cfg.train, cfg.train.seed);
    if (record.status != "ok") {
        throw NumericalError(record.status);
    }
    save_checkpoint((fs::path(out_dir) / "checkpoint.json").string(),
                    checkpoint_of(*cfg.model, record.trained_params));
    write_text_atomic((fs::path(out_dir) / "history.csv").string(), history_to_csv(record.history));
    emit((fs::path(out_dir) / "metrics.json").string(), final_metrics_json(record));
    std::cout << "training done; test f1 " << format_double(record.test_metrics.f1) << "\n";
    return 0;
}

int cmd_evaluate(const std::string& checkpoint_path, const std::string& config_path, const std::string& split_name,
                 const std::string& out_path) {
    const Checkpoint ckpt = load_checkpoint(checkpoint_path);
    const ExperimentConfig cfg = load_experiment_config(config_path);
    const Dataset full = build_dataset(cfg.dataset);
    Dataset chosen = full;
    if (split_name != "all") {
        auto [train_d, test_d] = split_dataset(cfg.dataset, full);
        chosen = split_name == "train" ? std::move(train_d) : std::move(test_d);
    }

    std::vector<double> outputs;
    std::vector<int> labels;
    if (ckpt.cnn_spec.has_value()) {
        const HybridModel model = hybrid_from_checkpoint(ckpt);
        const auto [x, y] = to_tensor(chosen);
        outputs = hybrid_forward(model, x);
        for (double v : y) {
            labels.push_back(v >= 0 ? 1 : -1);
        }
    } else {
        const CircuitPlan plan = build_model(ckpt.spec);
        const NumericDataset data = to_numeric(chosen);
        outputs = evaluate_outputs(plan, ckpt.params, data);
        for (double v : data.labels) {
            labels.push_back(v >= 0 ? 1 : -1);
        }
    }
    json j;
    j["split"] = split_name;
    j["count"] = outputs.size();
    j["metrics"] = metrics_to_json(compute_metrics(classify(outputs), labels));
    emit(out_path, j);
    return 0;
}

int cmd_landscape(const std::string& config_path, int samples, std::uint64_t seed, const std::string& out_path) {
    const ExperimentConfig cfg = load_experiment_config(config_path);
    if (!cfg.model.has_value()) {
        throw ValidationError("landscape: config needs a model section");
    }
    const Dataset full = build_dataset(cfg.dataset);
    const LabeledImage& point = full.items.front(); // fixed data point
    const auto stats = landscape_stats(*cfg.model, scale_features(point), point.label, samples, seed);
    json j;
    j["model"] = model_spec_to_json(*cfg.model);
    j["data_point"] = {{"index", 0}, {"label", point.label}};
    j["seed"] = seed;
    j["stats"] = landscape_to_json(stats);
    emit(out_path, j);
    return 0;
}

int cmd_compare(const std::string& config_path, const std::string& out_dir) {
    const ExperimentConfig cfg = load_experiment_config(config_path);
    ensure_dir(out_dir);
    const SweepResult result = compare_architectures(cfg);
    write_text_atomic((fs::path(out_dir) / "summary.csv").string(), result.summary_csv);
    write_text_atomic((fs::path(out_dir) / "losses.csv").string(), result.losses_csv);
    std::vector<double> final_losses;
    for (const auto& record : result.records) {
        const std::string name = "run_" + architecture_name(record.spec.architecture) + "_l" +
                                 std::to_string(record.spec.n_layers) + "_s" + std::to_string(record.seed) + ".json";
        emit((fs::path(out_dir) / name).string(), run_record_to_json(record));
        if (record.status == "ok") {
            final_losses.push_back(record.final_loss);
        }
    }
    if (final_losses.size() >= 2) {
        const MinimaCensus census = minima_census(final_losses);
        json j = {{"mean_loss", census.mean_loss},
                  {"min_loss", census.min_loss},
                  {"percent_below_mean", census.percent_below_mean}};
        emit((fs::path(out_dir) / "minima.json").string(), j);
    }
    std::cout << result.summary_csv;
    return 0;
}

int cmd_shapes(const std::string& config_path, const std::string& out_path) {
    const ExperimentConfig cfg = load_experiment_config(config_path);
    if (!cfg.cnn.has_value()) {
        throw ValidationError("shapes: config needs a cnn_pipeline section");
    }
    const auto chain = shape_chain(*cfg.cnn);
    json stages = json::array();
    for (const auto& [side, channels] : chain) {
        stages.push_back({{"side", side}, {"channels", channels}});
    }
    json j;
    j["stages"] = stages;
    j["final_features"] = chain.back().first * chain.back().first * chain.back().second;
    emit(out_path, j);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"C4 rotation-invariant variational quantum classifier toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir, out_path, checkpoint_path, split_name = "test";
    int n = 4, n_layers = 1, samples = 2000;
    std::uint64_t seed = 7;

    auto* gen = app.add_subcommand("generate-data", "synthesize a dataset and write raw + manifest");
    gen->add_option("--config", config_path, "experiment config JSON")->required();
    gen->add_option("--out", out_dir, "output directory")->required();

    auto* ver = app.add_subcommand("verify-symmetry", "orbit/U_g/equivariance suite as JSON");
    ver->add_option("--n", n, "image resolution");
    ver->add_option("--layers", n_layers, "equivariant block layers to verify");
    ver->add_option("--seed", seed, "random angle seed");
    ver->add_option("--out", out_path, "output JSON path (stdout when omitted)");

    auto* tr = app.add_subcommand("train", "single training run -> checkpoint + history");
    tr->add_option("--config", config_path, "experiment config JSON")->required();
    tr->add_option("--out", out_dir, "output directory")->required();

    auto* ev = app.add_subcommand("evaluate", "checkpoint + dataset -> metrics JSON");
    ev->add_option("--checkpoint", checkpoint_path, "checkpoint JSON")->required();
    ev->add_option("--config", config_path, "experiment config JSON")->required();
    ev->add_option("--split", split_name, "train | test | all");
    ev->add_option("--out", out_path, "output JSON path (stdout when omitted)");

    auto* la = app.add_subcommand("landscape", "random-parameter loss/gradient statistics");
    la->add_option("--config", config_path, "experiment config JSON")->required();
    la->add_option("--samples", samples, "parameter draws");
    la->add_option("--seed", seed, "sampling seed")->required();
    la->add_option("--out", out_path, "output JSON path (stdout when omitted)");

    auto* co = app.add_subcommand("compare", "architecture sweep -> summary CSV + run records");
    co->add_option("--config", config_path, "experiment config JSON")->required();
    co->add_option("--out", out_dir, "output directory")->required();

    auto* sh = app.add_subcommand("shapes", "CNN pipeline shape chain from config");
    sh->add_option("--config", config_path, "experiment config JSON")->required();
    sh->add_option("--out", out_path, "output JSON path (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            return cmd_generate_data(config_path, out_dir);
        }
        if (ver->parsed()) {
            return cmd_verify_symmetry(n, n_layers, seed, out_path);
        }
        if (tr->parsed()) {
            return cmd_train(config_path, out_dir);
        }
        if (ev->parsed()) {
            return cmd_evaluate(checkpoint_path, config_path, split_name, out_path);
        }
        if (la->parsed()) {
            return cmd_landscape(config_path, samples, seed, out_path);
        }
        if (co->parsed()) {
            return cmd_compare(config_path, out_dir);
        }
        if (sh->parsed()) {
            return cmd_shapes(config_path, out_path);
        }
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
