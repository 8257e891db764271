#include "hogface/pipeline.hpp"

#include "hogface/errors.hpp"
#include "hogface/parallel.hpp"

namespace hogface {

void PipelineConfig::validate() const {
    if (rows < 2 || cols < 2) throw ArgumentError("working image must be at least 2x2");
    if (dwt && (rows % 2 != 0 || cols % 2 != 0)) {
        throw ArgumentError("wavelet preprocessing needs even image dimensions");
    }
    if (dims < 1) throw ArgumentError("need at least one eigenvector per bin");
    if (mode == FeatureMode::hog2d) {
        hog.validate();
        const std::size_t step = hog.cell * hog.block;
        if (working_rows() % step != 0 || working_cols() % step != 0) {
            throw ArgumentError("working image " + std::to_string(working_rows()) + "x" +
                                std::to_string(working_cols()) + " is not divisible by cell*block = " +
                                std::to_string(step));
        }
    }
    if (dims > layer_cols()) {
        throw ArgumentError("cannot keep " + std::to_string(dims) + " eigenvectors of " +
                            std::to_string(layer_cols()) + "-column layers");
    }
}

std::size_t PipelineConfig::layer_rows() const noexcept {
    return mode == FeatureMode::raw ? working_rows() : working_rows() / hog.cell;
}

std::size_t PipelineConfig::layer_cols() const noexcept {
    return mode == FeatureMode::raw ? working_cols() : working_cols() / hog.cell;
}

std::string PipelineConfig::feature_shape() const {
    return std::to_string(layer_rows()) + "x" + std::to_string(layer_cols()) + "x" + std::to_string(layer_count());
}

GrayImage preprocess(const GrayImage& img, const PipelineConfig& cfg) {
    GrayImage out = resize_to(img, cfg.rows, cfg.cols);
    if (cfg.dwt) out = haar_dwt_ll(out);
    return out;
}

HogLayers image_layers(const GrayImage& img, const PipelineConfig& cfg) {
    const GrayImage work = preprocess(img, cfg);
    if (cfg.mode == FeatureMode::raw) {
        HogLayers single;
        single.layers.emplace_back(work.rows, work.cols, work.data);
        return single;
    }
    return extract(work, cfg.hog);
}

std::vector<HogLayers> image_layers(std::span<const GrayImage> images, const PipelineConfig& cfg,
                                    std::size_t jobs) {
    cfg.validate();
    std::vector<HogLayers> out(images.size());
    parallel_for(images.size(), jobs, [&](std::size_t i) { out[i] = image_layers(images[i], cfg); });
    return out;
}

void Model::check_consistent() const {
    config.validate();
    if (bases.size() != config.layer_count()) {
        throw StateError("model has " + std::to_string(bases.size()) + " bases, config expects " +
                         std::to_string(config.layer_count()));
    }
    for (std::size_t b = 0; b < bases.size(); ++b) {
        const auto& basis = bases[b];
        if (basis.input_cols() != config.layer_cols() || basis.dims() != config.dims ||
            basis.eigenvalues.size() != config.dims) {
            throw StateError("bin " + std::to_string(b) + ": basis " + shape_string(basis.vectors) +
                             " does not match config " + config.feature_shape() + " d=" +
                             std::to_string(config.dims));
        }
    }
    for (std::size_t i = 0; i < gallery.size(); ++i) {
        const auto& e = gallery[i];
        if (e.features.size() != bases.size()) {
            throw StateError("gallery entry " + std::to_string(i) + " has " + std::to_string(e.features.size()) +
                             " bins");
        }
        for (std::size_t b = 0; b < e.features.size(); ++b) {
            if (e.features[b].rows() != config.layer_rows() || e.features[b].cols() != config.dims) {
                throw StateError("gallery entry " + std::to_string(i) + ", bin " + std::to_string(b) +
                                 ": features " + shape_string(e.features[b]) + " do not match the config");
            }
        }
    }
}

Model train_model(std::span<const HogLayers> layers, std::span<const std::string> labels,
                  std::span<const std::string> source_ids, const PipelineConfig& cfg, std::size_t jobs) {
    cfg.validate();
    if (labels.size() != layers.size() || source_ids.size() != layers.size()) {
        throw ArgumentError("layers, labels and source ids differ in length");
    }
    Model model{cfg, train_bases(layers, cfg.dims, jobs), {}};
    model.gallery.resize(layers.size());
    parallel_for(layers.size(), jobs, [&](std::size_t i) {
        model.gallery[i] = make_entry(layers[i], model.bases, labels[i], source_ids[i]);
    });
    return model;
}

}  // namespace hogface
