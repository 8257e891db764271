// Command-line front end: train, evaluate, predict, bench, export-json.
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hogface/classifier.hpp"
#include "hogface/datasets.hpp"
#include "hogface/errors.hpp"
#include "hogface/experiment.hpp"
#include "hogface/modelstore.hpp"
#include "hogface/pipeline.hpp"

namespace fs = std::filesystem;
using namespace hogface;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;

struct PipelineFlags {
    std::size_t bins = 9;
    std::size_t dims = 10;
    std::size_t cell = 4;
    std::size_t block = 2;
    std::size_t rows = 112;
    std::size_t cols = 96;
    double epsilon = 1e-5;
    bool spatial = false;
    std::string mode = "2dhog";

    void attach(CLI::App* app) {
        app->add_option("--bins", bins, "Orientation bins B")->capture_default_str();
        app->add_option("--dims", dims, "Eigenvectors kept per bin (d)")->capture_default_str();
        app->add_option("--cell", cell, "Cell side in pixels")->capture_default_str();
        app->add_option("--block", block, "Block side in cells")->capture_default_str();
        app->add_option("--rows", rows, "Working image rows before the wavelet step")->capture_default_str();
        app->add_option("--cols", cols, "Working image cols before the wavelet step")->capture_default_str();
        app->add_option("--epsilon", epsilon, "Block normalization epsilon")->capture_default_str();
        app->add_flag("--spatial", spatial, "Skip the Haar LL step and work in the spatial domain");
        app->add_option("--mode", mode, "2dhog, or 2dpca for the plain 2DPCA baseline")
            ->check(CLI::IsMember({"2dhog", "2dpca"}))
            ->capture_default_str();
    }

    PipelineConfig config() const {
        PipelineConfig cfg;
        cfg.rows = rows;
        cfg.cols = cols;
        cfg.dwt = !spatial;
        cfg.mode = mode == "2dpca" ? FeatureMode::raw : FeatureMode::hog2d;
        cfg.hog.bins = bins;
        cfg.hog.cell = cell;
        cfg.hog.block = block;
        cfg.hog.epsilon = epsilon;
        cfg.dims = dims;
        cfg.validate();
        return cfg;
    }
};

fs::path default_root(Layout layout) {
    const char* env = std::getenv("HOGFACE_DATA_ROOT");
    const fs::path base = env && *env ? fs::path(env) : fs::path("data");
    switch (layout) {
        case Layout::orl: return base / "ORL";
        case Layout::umist: return base / "UMIST";
        case Layout::jaffe: return base / "JAFFE";
        case Layout::flat: return base / "FLAT";
    }
    return base;
}

std::vector<LabeledImage> load(const std::string& data, const std::string& layout_text) {
    const Layout layout = parse_layout(layout_text);
    const fs::path root = data.empty() ? default_root(layout) : fs::path(data);
    return load_dataset(root, layout);
}

std::string dataset_display_name(const std::string& data, const std::string& layout) {
    if (layout != "flat") return layout;
    return data.empty() ? "flat" : fs::path(data).filename().string();
}

void write_csv(const std::string& path, const std::vector<BenchRow>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << csv_header() << "\n";
    for (const auto& r : rows) out << csv_row(r) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

struct Common {
    std::string data;
    std::string layout = "orl";
    std::string protocol = "I";
    std::size_t jobs = 1;
    std::optional<std::uint64_t> shuffle_seed;

    void attach(CLI::App* app, bool with_protocol = true) {
        app->add_option("--data", data, "Dataset root (default: $HOGFACE_DATA_ROOT/<LAYOUT>)");
        app->add_option("--layout", layout, "orl, umist, jaffe or flat")
            ->check(CLI::IsMember({"orl", "umist", "jaffe", "flat"}))
            ->capture_default_str();
        if (with_protocol) {
            app->add_option("--protocol", protocol, "first<K>, I, II, III/loo or self")->capture_default_str();
        }
        app->add_option("--jobs", jobs, "Worker threads (0 = all cores)")->capture_default_str();
        app->add_option("--seeded-shuffle", shuffle_seed, "Permute image order within each class with this seed");
    }
};

int cmd_train(const Common& common, const PipelineFlags& flags, const std::string& out) {
    const PipelineConfig cfg = flags.config();
    auto dataset = load(common.data, common.layout);
    if (common.shuffle_seed) shuffle_within_classes(dataset, *common.shuffle_seed);
    const Protocol protocol = Protocol::parse(common.protocol);
    if (protocol.kind == Protocol::Kind::loo) {
        throw ArgumentError("train needs a single training set; use first<K> or self");
    }
    std::vector<std::size_t> train;
    if (protocol.kind == Protocol::Kind::self) {
        for (std::size_t i = 0; i < dataset.size(); ++i) train.push_back(i);
    } else {
        train = split(dataset, SplitProtocol::first_k(protocol.k)).train;
    }
    std::vector<GrayImage> images;
    std::vector<std::string> labels;
    std::vector<std::string> sources;
    for (auto i : train) {
        images.push_back(dataset[i].image);
        labels.push_back(dataset[i].label);
        sources.push_back(dataset[i].path);
    }
    const auto t0 = std::chrono::steady_clock::now();
    const auto layers = image_layers(images, cfg, common.jobs);
    const Model model = train_model(layers, labels, sources, cfg, common.jobs);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto bytes = save_model_file(model, out);
    std::cout << "feature shape " << cfg.feature_shape() << "\n"
              << "bases " << model.bases.size() << " x " << shape_string(model.bases.front().vectors) << "\n"
              << "gallery " << model.gallery.size() << " entries\n"
              << "model " << out << " (" << bytes << " bytes), trained in " << secs << " s\n";
    return kExitOk;
}

int cmd_evaluate(const Common& common, const PipelineFlags& flags, const std::string& model_path,
                 const std::string& csv) {
    auto dataset = load(common.data, common.layout);
    const std::string name = dataset_display_name(common.data, common.layout);
    const Protocol protocol = Protocol::parse(common.protocol);
    BenchRow row;
    if (!model_path.empty()) {
        const Model model = load_model_file(model_path);
        if (common.shuffle_seed) shuffle_within_classes(dataset, *common.shuffle_seed);
        std::vector<LabeledImage> test;
        if (protocol.kind == Protocol::Kind::self) {
            test = dataset;
        } else if (protocol.kind == Protocol::Kind::first_k) {
            for (auto i : split(dataset, SplitProtocol::first_k(protocol.k)).test) test.push_back(dataset[i]);
        } else {
            throw ArgumentError("leave-one-out retrains per fold; run evaluate without --model");
        }
        row = evaluate_model(model, name, test, common.jobs);
        row.protocol = protocol.name();
        row.published_target = published_target(name, protocol);
        row.shuffle_seed = common.shuffle_seed;
    } else {
        row = run_experiment(name, dataset, protocol, flags.config(), {common.jobs, common.shuffle_seed});
    }
    write_table(std::cout, {row});
    if (!csv.empty()) write_csv(csv, {row});
    return kExitOk;
}

int cmd_predict(const std::string& model_path, const std::string& image_path, std::size_t top) {
    const Model model = load_model_file(model_path);
    const GrayImage image = read_pgm(image_path);
    const auto ranked = rank(image_layers(image, model.config), model.bases, model.gallery, top);
    for (const auto& r : ranked) {
        std::printf("%s %.9g %zu %.9g\n", r.label.c_str(), r.score, r.votes, r.total_distance);
    }
    return kExitOk;
}

struct BenchFlags {
    std::string orl;
    std::string umist;
    std::string jaffe;
    std::vector<std::string> datasets{"orl", "umist", "jaffe"};
    std::vector<std::string> protocols{"I", "II", "III"};
    std::string csv;
    bool baseline = false;
};

int cmd_bench(const Common& common, const PipelineFlags& flags, const BenchFlags& bench) {
    if (bench.protocols.empty()) throw ArgumentError("bench needs at least one protocol");
    if (bench.datasets.empty()) throw ArgumentError("bench needs at least one dataset");
    const PipelineConfig cfg = flags.config();
    std::vector<Protocol> protocols;
    for (const auto& p : bench.protocols) protocols.push_back(Protocol::parse(p));

    std::vector<PipelineConfig> configs{cfg};
    if (bench.baseline) {
        PipelineConfig base = cfg;
        base.mode = FeatureMode::raw;
        base.validate();
        configs.push_back(base);
    }

    std::vector<BenchRow> rows;
    bool failed = false;
    for (const auto& name : bench.datasets) {
        const Layout layout = parse_layout(name);
        const std::string& explicit_root = layout == Layout::orl     ? bench.orl
                                           : layout == Layout::umist ? bench.umist
                                           : layout == Layout::jaffe ? bench.jaffe
                                                                     : common.data;
        std::vector<LabeledImage> dataset;
        std::string load_error;
        try {
            dataset = load(explicit_root, name);
            std::cerr << name << ": " << dataset.size() << " images, " << class_sizes(dataset).size()
                      << " classes\n";
        } catch (const std::exception& e) {
            load_error = e.what();
        }
        for (const auto& c : configs) {
            for (const auto& p : protocols) {
                BenchRow row;
                if (load_error.empty()) {
                    try {
                        row = run_experiment(name, dataset, p, c, {common.jobs, common.shuffle_seed});
                    } catch (const std::exception& e) {
                        row.error = e.what();
                    }
                } else {
                    row.error = load_error;
                }
                if (!row.error.empty()) {
                    failed = true;
                    row.dataset = name;
                    row.protocol = p.name();
                    row.mode = c.mode == FeatureMode::raw ? "2dpca" : "2dhog";
                    row.feature_shape = c.feature_shape();
                }
                rows.push_back(row);
            }
        }
    }
    write_table(std::cout, rows);
    if (!bench.csv.empty()) write_csv(bench.csv, rows);
    return failed ? kExitInput : kExitOk;
}

nlohmann::json matrix_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return rows;
}

int cmd_export_json(const std::string& model_path, const std::string& out_path) {
    const Model model = load_model_file(model_path);
    const auto& cfg = model.config;
    nlohmann::json j;
    j["config"] = {{"rows", cfg.rows},           {"cols", cfg.cols},
                   {"dwt", cfg.dwt},             {"mode", cfg.mode == FeatureMode::raw ? "2dpca" : "2dhog"},
                   {"bins", cfg.hog.bins},       {"cell", cfg.hog.cell},
                   {"block", cfg.hog.block},     {"epsilon", cfg.hog.epsilon},
                   {"dims", cfg.dims},           {"feature_shape", cfg.feature_shape()}};
    for (const auto& b : model.bases) j["bases"].push_back({{"eigenvalues", b.eigenvalues}, {"vectors", matrix_json(b.vectors)}});
    j["gallery"] = nlohmann::json::array();
    for (const auto& e : model.gallery) {
        nlohmann::json features = nlohmann::json::array();
        for (const auto& f : e.features) features.push_back(matrix_json(f));
        j["gallery"].push_back({{"label", e.label}, {"source_id", e.source_id}, {"features", features}});
    }
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(out_path, std::ios::trunc);
        out << j.dump(2) << "\n";
        if (!out) throw IoError("write failed: " + out_path);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D-HOG / 2DPCA face recognition"};
    app.require_subcommand(1);

    Common common;
    PipelineFlags flags;
    std::string out;
    std::string model_path;
    std::string image_path;
    std::string csv;
    std::size_t top = 5;
    BenchFlags bench;

    auto* train = app.add_subcommand("train", "Train bases and enroll the training half of a protocol");
    common.attach(train);
    flags.attach(train);
    train->add_option("--out", out, "Model file to write")->required();

    auto* evaluate = app.add_subcommand("evaluate", "Run a protocol, or score a saved model on its test half");
    common.attach(evaluate);
    flags.attach(evaluate);
    evaluate->add_option("--model", model_path, "Score this model instead of training in memory");
    evaluate->add_option("--csv", csv, "Also write the report as CSV");

    auto* predict = app.add_subcommand("predict", "Rank gallery labels for one image");
    predict->add_option("--model", model_path, "Model file")->required();
    predict->add_option("--image", image_path, "PGM image")->required();
    predict->add_option("--top", top, "Number of ranked labels")->check(CLI::PositiveNumber)->capture_default_str();

    auto* benchcmd = app.add_subcommand("bench", "Run protocols I/II/III over the benchmark datasets");
    common.attach(benchcmd, false);
    flags.attach(benchcmd);
    benchcmd->add_option("--orl", bench.orl, "ORL root");
    benchcmd->add_option("--umist", bench.umist, "UMIST root");
    benchcmd->add_option("--jaffe", bench.jaffe, "JAFFE root");
    benchcmd->add_option("--datasets", bench.datasets, "Datasets to run")->delimiter(',')->capture_default_str();
    benchcmd->add_option("--protocols", bench.protocols, "Protocols to run")->delimiter(',')->capture_default_str();
    benchcmd->add_option("--csv", bench.csv, "Also write the report as CSV");
    benchcmd->add_flag("--baseline", bench.baseline, "Add plain 2DPCA rows");

    auto* export_json = app.add_subcommand("export-json", "Dump a model as JSON for inspection");
    export_json->add_option("--model", model_path, "Model file")->required();
    export_json->add_option("--out", out, "Output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*train) return cmd_train(common, flags, out);
        if (*evaluate) return cmd_evaluate(common, flags, model_path, csv);
        if (*predict) return cmd_predict(model_path, image_path, top);
        if (*benchcmd) return cmd_bench(common, flags, bench);
        if (*export_json) return cmd_export_json(model_path, out);
    } catch (const LoadError& e) {
        std::cerr << "load error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ModelLoadError& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return kExitInput;
    } catch (const DecodeError& e) {
        std::cerr << "decode error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const StateError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitInput;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
