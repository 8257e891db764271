#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hogface/classifier.hpp"
#include "hogface/hog.hpp"
#include "hogface/imgio.hpp"
#include "hogface/pca2d.hpp"

namespace hogface {

enum class FeatureMode {
    hog2d,  ///< 2D-HOG layers, one basis per orientation bin
    raw,    ///< plain 2DPCA baseline: the working image is the single layer
};

struct PipelineConfig {
    std::size_t rows = 112;  ///< working size before the wavelet step
    std::size_t cols = 96;
    bool dwt = true;
    FeatureMode mode = FeatureMode::hog2d;
    HogConfig hog;
    std::size_t dims = 10;  ///< eigenvectors kept per bin

    void validate() const;

    std::size_t working_rows() const noexcept { return dwt ? rows / 2 : rows; }
    std::size_t working_cols() const noexcept { return dwt ? cols / 2 : cols; }
    std::size_t layer_count() const noexcept { return mode == FeatureMode::raw ? 1 : hog.bins; }
    std::size_t layer_rows() const noexcept;
    std::size_t layer_cols() const noexcept;

    /// Layer geometry as "RxCxB", e.g. "14x12x9".
    std::string feature_shape() const;

    friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Resize to the configured size, then take the Haar LL band when dwt is set.
GrayImage preprocess(const GrayImage& img, const PipelineConfig& cfg);

/// Preprocess and build layers according to cfg.mode.
HogLayers image_layers(const GrayImage& img, const PipelineConfig& cfg);

std::vector<HogLayers> image_layers(std::span<const GrayImage> images, const PipelineConfig& cfg,
                                    std::size_t jobs = 1);

struct Model {
    PipelineConfig config;
    std::vector<ProjectionBasis> bases;
    std::vector<GalleryEntry> gallery;

    /// Throws StateError when bases or gallery disagree with the config.
    void check_consistent() const;

    friend bool operator==(const Model&, const Model&) = default;
};

/// Trains per-bin bases on `layers` and enrolls each one into the gallery.
Model train_model(std::span<const HogLayers> layers, std::span<const std::string> labels,
                  std::span<const std::string> source_ids, const PipelineConfig& cfg, std::size_t jobs = 1);

}  // namespace hogface
