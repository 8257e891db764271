#include "hogface/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <ostream>

#include "hogface/errors.hpp"
#include "hogface/modelstore.hpp"
#include "hogface/parallel.hpp"

namespace hogface {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string mode_name(FeatureMode mode) { return mode == FeatureMode::raw ? "2dpca" : "2dhog"; }

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string confusion_summary(const std::vector<std::string>& truth, const std::vector<std::string>& predicted) {
    std::map<std::pair<std::string, std::string>, std::size_t> counts;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (truth[i] != predicted[i]) ++counts[{truth[i], predicted[i]}];
    std::vector<std::pair<std::pair<std::string, std::string>, std::size_t>> pairs(counts.begin(), counts.end());
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::string out;
    for (std::size_t i = 0; i < pairs.size() && i < 5; ++i) {
        if (!out.empty()) out += ';';
        out += pairs[i].first.first + ">" + pairs[i].first.second + ":" + std::to_string(pairs[i].second);
    }
    return out.empty() ? "-" : out;
}

BenchRow base_row(const std::string& dataset_name, const Protocol& protocol, const PipelineConfig& cfg) {
    BenchRow row;
    row.dataset = dataset_name;
    row.protocol = protocol.name();
    row.mode = mode_name(cfg.mode);
    row.bins = cfg.layer_count();
    row.dims = cfg.dims;
    row.feature_shape = cfg.feature_shape();
    row.published_target = published_target(dataset_name, protocol);
    return row;
}

template <typename T>
std::vector<T> pick(const std::vector<T>& all, const std::vector<std::size_t>& idx) {
    std::vector<T> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(all[i]);
    return out;
}

Model train_subset(const std::vector<LabeledImage>& dataset, const std::vector<HogLayers>& layers,
                   const std::vector<std::size_t>& train, const PipelineConfig& cfg, std::size_t jobs) {
    std::vector<HogLayers> train_layers;
    std::vector<std::string> labels;
    std::vector<std::string> sources;
    for (auto i : train) {
        train_layers.push_back(layers[i]);
        labels.push_back(dataset[i].label);
        sources.push_back(dataset[i].path);
    }
    return train_model(train_layers, labels, sources, cfg, jobs);
}

}  // namespace

Protocol Protocol::parse(const std::string& text) {
    const auto t = lower(text);
    if (t == "i") return {Kind::first_k, 5};
    if (t == "ii") return {Kind::first_k, 3};
    if (t == "iii" || t == "loo") return {Kind::loo, 0};
    if (t == "self" || t == "all") return {Kind::self, 0};
    if (t.rfind("first", 0) == 0 && t.size() > 5) {
        std::size_t k = 0;
        for (char c : t.substr(5)) {
            if (c < '0' || c > '9') throw ArgumentError("bad protocol '" + text + "'");
            k = k * 10 + static_cast<std::size_t>(c - '0');
        }
        if (k == 0) throw ArgumentError("first-k protocol needs k >= 1");
        return {Kind::first_k, k};
    }
    throw ArgumentError("unknown protocol '" + text + "' (expected firstK, I, II, III, loo or self)");
}

std::string Protocol::name() const {
    switch (kind) {
        case Kind::first_k: return "first" + std::to_string(k);
        case Kind::loo: return "loo";
        case Kind::self: return "self";
    }
    return "?";
}

std::optional<double> published_target(const std::string& dataset, const Protocol& protocol) {
    const auto d = lower(dataset);
    const bool exp1 = protocol.kind == Protocol::Kind::first_k && protocol.k == 5;
    const bool exp2 = protocol.kind == Protocol::Kind::first_k && protocol.k == 3;
    const bool exp3 = protocol.kind == Protocol::Kind::loo;
    if (d == "orl") {
        if (exp1) return 0.97;
        if (exp2) return 0.8464;
        if (exp3) return 1.0;
    } else if (d == "umist") {
        if (exp1) return 0.9035;
        if (exp2) return 0.8518;
        if (exp3) return 1.0;
    } else if (d == "jaffe") {
        if (exp1 || exp2 || exp3) return 1.0;
    }
    return std::nullopt;
}

BenchRow run_experiment(const std::string& dataset_name, const std::vector<LabeledImage>& dataset,
                        const Protocol& protocol, const PipelineConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    BenchRow row = base_row(dataset_name, protocol, cfg);
    row.shuffle_seed = opts.shuffle_seed;

    std::vector<LabeledImage> shuffled;
    const std::vector<LabeledImage>* data = &dataset;
    if (opts.shuffle_seed) {
        shuffled = dataset;
        shuffle_within_classes(shuffled, *opts.shuffle_seed);
        data = &shuffled;
    }
    std::vector<GrayImage> images;
    images.reserve(data->size());
    for (const auto& img : *data) images.push_back(img.image);

    if (protocol.kind == Protocol::Kind::loo) {
        const LooSweep sweep(*data);
        const auto t_extract = Clock::now();
        const auto layers = image_layers(images, cfg, opts.jobs);
        const double extract_seconds = seconds_since(t_extract);

        std::vector<std::string> predicted(sweep.size());
        std::vector<double> train_time(sweep.size());
        std::vector<double> test_time(sweep.size());
        std::vector<std::size_t> model_bytes(sweep.size());
        parallel_for(sweep.size(), opts.jobs, [&](std::size_t f) {
            const Split fold = sweep.fold(f);
            const auto t0 = Clock::now();
            const Model model = train_subset(*data, layers, fold.train, cfg, 1);
            train_time[f] = seconds_since(t0);
            const auto t1 = Clock::now();
            predicted[f] = classify(layers[fold.test.front()], model.bases, model.gallery).label;
            test_time[f] = seconds_since(t1);
            if (f == 0) model_bytes[f] = serialize_model(model).size();
        });

        std::vector<std::string> truth;
        for (const auto& img : *data) truth.push_back(img.label);
        row.train_images = data->size() - 1;
        row.test_images = data->size();
        for (std::size_t i = 0; i < truth.size(); ++i) row.correct += truth[i] == predicted[i];
        row.accuracy = static_cast<double>(row.correct) / static_cast<double>(row.test_images);
        row.confusion = confusion_summary(truth, predicted);
        row.model_bytes = model_bytes.front();
        const double n = static_cast<double>(sweep.size());
        double train_sum = 0.0;
        double test_sum = 0.0;
        for (std::size_t f = 0; f < sweep.size(); ++f) {
            train_sum += train_time[f];
            test_sum += test_time[f];
        }
        row.train_seconds = train_sum / n + extract_seconds * (n - 1.0) / n;
        row.test_ms_per_image = 1000.0 * (test_sum / n + extract_seconds / n);
        return row;
    }

    Split parts;
    if (protocol.kind == Protocol::Kind::self) {
        for (std::size_t i = 0; i < data->size(); ++i) {
            parts.train.push_back(i);
            parts.test.push_back(i);
        }
    } else {
        parts = split(*data, SplitProtocol::first_k(protocol.k));
    }

    const auto t_train = Clock::now();
    const auto train_images = pick(images, parts.train);
    const auto train_layers = image_layers(train_images, cfg, opts.jobs);
    std::vector<HogLayers> all_layers(data->size());
    for (std::size_t j = 0; j < parts.train.size(); ++j) all_layers[parts.train[j]] = train_layers[j];
    const Model model = train_subset(*data, all_layers, parts.train, cfg, opts.jobs);
    row.train_seconds = seconds_since(t_train);
    row.model_bytes = serialize_model(model).size();

    const auto test_set = pick(*data, parts.test);
    BenchRow scored = evaluate_model(model, dataset_name, test_set, opts.jobs);
    row.train_images = parts.train.size();
    row.test_images = scored.test_images;
    row.correct = scored.correct;
    row.accuracy = scored.accuracy;
    row.confusion = scored.confusion;
    row.test_ms_per_image = scored.test_ms_per_image;
    return row;
}

BenchRow evaluate_model(const Model& model, const std::string& dataset_name,
                        const std::vector<LabeledImage>& images, std::size_t jobs) {
    model.check_consistent();
    if (images.empty()) throw ArgumentError("nothing to evaluate");
    BenchRow row = base_row(dataset_name, Protocol{Protocol::Kind::self, 0}, model.config);
    row.protocol = "model";
    row.published_target.reset();
    row.train_images = model.gallery.size();
    row.model_bytes = serialize_model(model).size();

    std::vector<std::string> predicted(images.size());
    const auto t0 = Clock::now();
    parallel_for(images.size(), jobs, [&](std::size_t i) {
        const auto layers = image_layers(images[i].image, model.config);
        predicted[i] = classify(layers, model.bases, model.gallery).label;
    });
    const double elapsed = seconds_since(t0);

    std::vector<std::string> truth;
    for (const auto& img : images) truth.push_back(img.label);
    row.test_images = images.size();
    for (std::size_t i = 0; i < truth.size(); ++i) row.correct += truth[i] == predicted[i];
    row.accuracy = static_cast<double>(row.correct) / static_cast<double>(row.test_images);
    row.confusion = confusion_summary(truth, predicted);
    row.test_ms_per_image = 1000.0 * elapsed / static_cast<double>(images.size());
    return row;
}

std::string csv_header() {
    return "dataset,protocol,mode,bins,dims,feature_shape,train_images,test_images,correct,accuracy,"
           "published_target,shuffle_seed,model_bytes,confusion,error,train_seconds,test_ms_per_image";
}

std::string csv_row(const BenchRow& row) {
    char acc[32];
    std::snprintf(acc, sizeof acc, "%.6f", row.accuracy);
    char target[32] = "";
    if (row.published_target) std::snprintf(target, sizeof target, "%.4f", *row.published_target);
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.4f,%.4f", row.train_seconds, row.test_ms_per_image);
    auto quoted = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        return q + "\"";
    };
    return quoted(row.dataset) + "," + row.protocol + "," + row.mode + "," + std::to_string(row.bins) + "," +
           std::to_string(row.dims) + "," + row.feature_shape + "," + std::to_string(row.train_images) + "," +
           std::to_string(row.test_images) + "," + std::to_string(row.correct) + "," + acc + "," + target + "," +
           (row.shuffle_seed ? std::to_string(*row.shuffle_seed) : std::string()) + "," +
           std::to_string(row.model_bytes) + "," + quoted(row.confusion) + "," + quoted(row.error) + "," + timing;
}

void write_table(std::ostream& out, const std::vector<BenchRow>& rows) {
    char line[256];
    std::snprintf(line, sizeof line, "%-8s %-8s %-6s %-10s %6s %6s %9s %8s %11s %12s\n", "dataset", "protocol",
                  "mode", "shape", "train", "test", "accuracy", "target", "train_s", "test_ms/img");
    out << line;
    for (const auto& r : rows) {
        if (!r.error.empty()) {
            out << r.dataset << " " << r.protocol << " FAILED: " << r.error << "\n";
            continue;
        }
        char target[16] = "-";
        if (r.published_target) std::snprintf(target, sizeof target, "%.2f%%", 100.0 * *r.published_target);
        std::snprintf(line, sizeof line, "%-8s %-8s %-6s %-10s %6zu %6zu %8.2f%% %8s %11.3f %12.3f\n",
                      r.dataset.c_str(), r.protocol.c_str(), r.mode.c_str(), r.feature_shape.c_str(),
                      r.train_images, r.test_images, 100.0 * r.accuracy, target, r.train_seconds,
                      r.test_ms_per_image);
        out << line;
    }
}

}  // namespace hogface
