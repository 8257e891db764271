#include "hogface/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <numeric>
#include <random>

#include "hogface/errors.hpp"

namespace fs = std::filesystem;

namespace hogface {

Layout parse_layout(std::string_view name) {
    if (name == "orl") return Layout::orl;
    if (name == "umist") return Layout::umist;
    if (name == "jaffe") return Layout::jaffe;
    if (name == "flat") return Layout::flat;
    throw ArgumentError("unknown dataset layout '" + std::string(name) + "' (expected orl, umist, jaffe or flat)");
}

std::string_view layout_name(Layout layout) {
    switch (layout) {
        case Layout::orl: return "orl";
        case Layout::umist: return "umist";
        case Layout::jaffe: return "jaffe";
        case Layout::flat: return "flat";
    }
    return "?";
}

namespace {

bool is_pgm(const fs::path& p) {
    auto ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".pgm";
}

std::optional<std::size_t> parse_number(std::string_view text) {
    std::size_t value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size() || text.empty()) return std::nullopt;
    return value;
}

std::vector<fs::path> sorted_pgms(const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && is_pgm(e.path())) out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

LabeledImage load_one(const fs::path& path, std::string label, std::size_t index) {
    try {
        return {std::move(label), index, read_pgm(path), path.string()};
    } catch (const std::exception& e) {
        throw LoadError("cannot read " + path.string() + ": " + e.what());
    }
}

std::vector<LabeledImage> load_orl(const fs::path& root) {
    std::vector<LabeledImage> out;
    for (const auto& dir : fs::directory_iterator(root)) {
        if (!dir.is_directory()) continue;
        const auto name = dir.path().filename().string();
        if (name.size() < 2 || name[0] != 's' || !parse_number(std::string_view(name).substr(1))) continue;
        for (const auto& file : sorted_pgms(dir.path())) {
            const auto index = parse_number(file.stem().string());
            if (!index || *index == 0) throw LoadError("ORL file name is not a positive number: " + file.string());
            out.push_back(load_one(file, name, *index));
        }
    }
    return out;
}

std::vector<LabeledImage> load_umist(const fs::path& root) {
    std::vector<LabeledImage> out;
    for (const auto& dir : fs::directory_iterator(root)) {
        if (!dir.is_directory()) continue;
        const auto label = dir.path().filename().string();
        std::size_t index = 0;
        for (const auto& file : sorted_pgms(dir.path())) out.push_back(load_one(file, label, ++index));
    }
    return out;
}

std::vector<LabeledImage> load_flat(const fs::path& root) {
    std::map<std::string, std::size_t> counters;
    std::vector<LabeledImage> out;
    for (const auto& file : sorted_pgms(root)) {
        const auto name = file.filename().string();
        const auto dot = name.find('.');
        if (dot == 0) throw LoadError("file name has an empty label prefix: " + file.string());
        std::string label = name.substr(0, dot);
        const std::size_t index = ++counters[label];
        out.push_back(load_one(file, std::move(label), index));
    }
    return out;
}

void sort_dataset(std::vector<LabeledImage>& dataset) {
    std::stable_sort(dataset.begin(), dataset.end(), [](const LabeledImage& a, const LabeledImage& b) {
        if (a.label != b.label) return a.label < b.label;
        return a.index < b.index;
    });
}

}  // namespace

std::vector<LabeledImage> load_dataset(const fs::path& root, Layout layout) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw LoadError("dataset root does not exist: " + root.string());
    std::vector<LabeledImage> out;
    try {
        switch (layout) {
            case Layout::orl: out = load_orl(root); break;
            case Layout::umist: out = load_umist(root); break;
            case Layout::jaffe:
            case Layout::flat: out = load_flat(root); break;
        }
    } catch (const fs::filesystem_error& e) {
        throw LoadError(std::string("cannot list ") + root.string() + ": " + e.what());
    }
    if (out.empty()) {
        throw LoadError("no images found under " + root.string() + " for layout " +
                        std::string(layout_name(layout)));
    }
    sort_dataset(out);
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i].label == out[i - 1].label && out[i].index == out[i - 1].index) {
            throw LoadError("duplicate image " + out[i].label + "/" + std::to_string(out[i].index) + " at " +
                            out[i].path);
        }
    }
    return out;
}

std::vector<std::pair<std::string, std::size_t>> class_sizes(const std::vector<LabeledImage>& dataset) {
    std::map<std::string, std::size_t> counts;
    for (const auto& img : dataset) ++counts[img.label];
    return {counts.begin(), counts.end()};
}

Split split(const std::vector<LabeledImage>& dataset, const SplitProtocol& protocol) {
    std::map<std::string, std::vector<std::size_t>> indices;
    for (const auto& img : dataset) indices[img.label].push_back(img.index);

    for (const auto& [label, idx] : indices) {
        if (protocol.kind == SplitProtocol::Kind::first_k_train) {
            if (protocol.value < 1 || protocol.value >= idx.size()) {
                throw ArgumentError("first-" + std::to_string(protocol.value) + " training is invalid for class '" +
                                    label + "' with " + std::to_string(idx.size()) + " images");
            }
        } else if (std::find(idx.begin(), idx.end(), protocol.value) == idx.end() || idx.size() < 2) {
            throw ArgumentError("class '" + label + "' cannot hold out image " + std::to_string(protocol.value));
        }
    }

    Split out;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const bool test = protocol.kind == SplitProtocol::Kind::first_k_train ? dataset[i].index > protocol.value
                                                                              : dataset[i].index == protocol.value;
        (test ? out.test : out.train).push_back(i);
    }
    return out;
}

LooSweep::LooSweep(const std::vector<LabeledImage>& dataset) : count_(dataset.size()) {
    for (const auto& [label, n] : class_sizes(dataset)) {
        if (n < 2) throw ArgumentError("leave-one-out needs at least 2 images in class '" + label + "'");
    }
}

Split LooSweep::fold(std::size_t i) const {
    if (i >= count_) throw ArgumentError("fold index out of range");
    Split s;
    s.test.push_back(i);
    s.train.reserve(count_ - 1);
    for (std::size_t j = 0; j < count_; ++j)
        if (j != i) s.train.push_back(j);
    return s;
}

void shuffle_within_classes(std::vector<LabeledImage>& dataset, std::uint64_t seed) {
    sort_dataset(dataset);
    std::mt19937_64 rng(seed);
    std::size_t begin = 0;
    while (begin < dataset.size()) {
        std::size_t end = begin;
        while (end < dataset.size() && dataset[end].label == dataset[begin].label) ++end;
        std::vector<std::size_t> order(end - begin);
        std::iota(order.begin(), order.end(), 1);
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i = begin; i < end; ++i) dataset[i].index = order[i - begin];
        begin = end;
    }
    sort_dataset(dataset);
}

}  // namespace hogface
