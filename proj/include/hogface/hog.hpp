#pragma once

#include <cstddef>
#include <vector>

#include "hogface/imgio.hpp"
#include "hogface/matrix.hpp"

namespace hogface {

struct GradientField {
    Matrix gx;
    Matrix gy;
};

struct HogConfig {
    std::size_t bins = 9;   ///< orientation bins over [0, 180) degrees
    std::size_t cell = 4;   ///< pixels per cell side
    std::size_t block = 2;  ///< cells per (non-overlapping) block side
    double epsilon = 1e-5;

    /// Throws ArgumentError unless bins >= 2, cell >= 2, block >= 1, epsilon > 0.
    void validate() const;

    friend bool operator==(const HogConfig&, const HogConfig&) = default;
};

/// Cell-level orientation histograms, indexed (cell row, cell col, bin).
class CellTensor {
public:
    CellTensor() = default;
    CellTensor(std::size_t rows, std::size_t cols, std::size_t bins)
        : rows_(rows), cols_(cols), bins_(bins), data_(rows * cols * bins, 0.0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t bins() const noexcept { return bins_; }

    double& operator()(std::size_t r, std::size_t c, std::size_t b) noexcept {
        return data_[(r * cols_ + c) * bins_ + b];
    }
    double operator()(std::size_t r, std::size_t c, std::size_t b) const noexcept {
        return data_[(r * cols_ + c) * bins_ + b];
    }

    friend bool operator==(const CellTensor&, const CellTensor&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t bins_ = 0;
    std::vector<double> data_;
};

/// The 2D-HOG representation: one cell-grid matrix per orientation bin.
struct HogLayers {
    std::vector<Matrix> layers;

    std::size_t bins() const noexcept { return layers.size(); }
    std::size_t rows() const noexcept { return layers.empty() ? 0 : layers.front().rows(); }
    std::size_t cols() const noexcept { return layers.empty() ? 0 : layers.front().cols(); }

    friend bool operator==(const HogLayers&, const HogLayers&) = default;
};

struct OrientationMagnitude {
    Matrix theta;  ///< degrees in [0, 180)
    Matrix mag;
};

/// Centered [-1, 0, 1] differences with replicated borders.
GradientField gradients(const GrayImage& img);

/// Unsigned orientation (mod 180) and magnitude; theta is 0 where magnitude is 0.
OrientationMagnitude orientation_magnitude(const GradientField& g);

/// Soft-binned cell histograms. Each pixel's magnitude is split linearly
/// between the two bins whose centers (k + 0.5) * 180 / B bracket its angle,
/// wrapping across 0/180.
CellTensor cell_histograms(const OrientationMagnitude& om, const HogConfig& cfg);

/// L2 normalization over disjoint block x block groups of cells:
/// v -> v / sqrt(|v|^2 + eps^2).
CellTensor block_normalize(const CellTensor& raw, const HogConfig& cfg);

HogLayers to_layers(const CellTensor& cells);

/// gradients -> orientation_magnitude -> cell_histograms -> block_normalize -> to_layers.
HogLayers extract(const GrayImage& img, const HogConfig& cfg);

}  // namespace hogface
