#include "hogface/hog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hogface/errors.hpp"

namespace hogface {

void HogConfig::validate() const {
    if (bins < 2) throw ArgumentError("HOG needs at least 2 orientation bins");
    if (cell < 2) throw ArgumentError("HOG cell size must be at least 2 pixels");
    if (block < 1) throw ArgumentError("HOG block size must be at least 1 cell");
    if (!(epsilon > 0.0)) throw ArgumentError("HOG epsilon must be positive");
}

GradientField gradients(const GrayImage& img) {
    if (img.rows < 2 || img.cols < 2) throw ArgumentError("gradients need an image of at least 2x2");
    const std::size_t rows = img.rows;
    const std::size_t cols = img.cols;
    GradientField g{Matrix(rows, cols), Matrix(rows, cols)};
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t up = r == 0 ? 0 : r - 1;
        const std::size_t down = std::min(r + 1, rows - 1);
        for (std::size_t c = 0; c < cols; ++c) {
            const std::size_t left = c == 0 ? 0 : c - 1;
            const std::size_t right = std::min(c + 1, cols - 1);
            g.gx(r, c) = img.at(r, right) - img.at(r, left);
            g.gy(r, c) = img.at(down, c) - img.at(up, c);
        }
    }
    return g;
}

OrientationMagnitude orientation_magnitude(const GradientField& g) {
    if (!g.gx.same_shape(g.gy)) throw ArgumentError("gradient components differ in shape");
    OrientationMagnitude om{Matrix(g.gx.rows(), g.gx.cols()), Matrix(g.gx.rows(), g.gx.cols())};
    constexpr double kDegrees = 180.0 / std::numbers::pi;
    const auto gx = g.gx.data();
    const auto gy = g.gy.data();
    auto theta = om.theta.data();
    auto mag = om.mag.data();
    for (std::size_t i = 0; i < gx.size(); ++i) {
        const double m = std::hypot(gx[i], gy[i]);
        mag[i] = m;
        if (m == 0.0) {
            theta[i] = 0.0;
            continue;
        }
        double t = std::atan2(gy[i], gx[i]) * kDegrees;
        if (t < 0.0) t += 180.0;
        if (t >= 180.0) t -= 180.0;
        theta[i] = t + 0.0;  // folds -0.0 into +0.0
    }
    return om;
}

CellTensor cell_histograms(const OrientationMagnitude& om, const HogConfig& cfg) {
    cfg.validate();
    if (!om.theta.same_shape(om.mag)) throw ArgumentError("orientation and magnitude differ in shape");
    const std::size_t rows = om.mag.rows();
    const std::size_t cols = om.mag.cols();
    if (rows % cfg.cell != 0 || cols % cfg.cell != 0) {
        throw ArgumentError("image " + std::to_string(rows) + "x" + std::to_string(cols) +
                            " is not divisible by cell size " + std::to_string(cfg.cell));
    }
    const std::size_t bins = cfg.bins;
    const double width = 180.0 / static_cast<double>(bins);
    CellTensor cells(rows / cfg.cell, cols / cfg.cell, bins);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t cr = r / cfg.cell;
        for (std::size_t c = 0; c < cols; ++c) {
            const double m = om.mag(r, c);
            if (m == 0.0) continue;
            // Continuous bin coordinate relative to bin centers.
            const double pos = om.theta(r, c) / width - 0.5;
            const double floor_pos = std::floor(pos);
            const double frac = pos - floor_pos;
            const auto k = static_cast<long long>(floor_pos);
            const auto n = static_cast<long long>(bins);
            const auto lower = static_cast<std::size_t>(((k % n) + n) % n);
            const auto upper = (lower + 1) % bins;
            const std::size_t cc = c / cfg.cell;
            cells(cr, cc, lower) += (1.0 - frac) * m;
            cells(cr, cc, upper) += frac * m;
        }
    }
    return cells;
}

CellTensor block_normalize(const CellTensor& raw, const HogConfig& cfg) {
    cfg.validate();
    if (raw.rows() % cfg.block != 0 || raw.cols() % cfg.block != 0) {
        throw ArgumentError("cell grid " + std::to_string(raw.rows()) + "x" + std::to_string(raw.cols()) +
                            " is not divisible by block size " + std::to_string(cfg.block));
    }
    CellTensor out = raw;
    const double eps2 = cfg.epsilon * cfg.epsilon;
    for (std::size_t br = 0; br < raw.rows(); br += cfg.block) {
        for (std::size_t bc = 0; bc < raw.cols(); bc += cfg.block) {
            double sq = 0.0;
            for (std::size_t r = br; r < br + cfg.block; ++r)
                for (std::size_t c = bc; c < bc + cfg.block; ++c)
                    for (std::size_t b = 0; b < raw.bins(); ++b) sq += raw(r, c, b) * raw(r, c, b);
            const double scale = 1.0 / std::sqrt(sq + eps2);
            for (std::size_t r = br; r < br + cfg.block; ++r)
                for (std::size_t c = bc; c < bc + cfg.block; ++c)
                    for (std::size_t b = 0; b < raw.bins(); ++b) out(r, c, b) = raw(r, c, b) * scale;
        }
    }
    return out;
}

HogLayers to_layers(const CellTensor& cells) {
    HogLayers out;
    out.layers.assign(cells.bins(), Matrix(cells.rows(), cells.cols()));
    for (std::size_t r = 0; r < cells.rows(); ++r)
        for (std::size_t c = 0; c < cells.cols(); ++c)
            for (std::size_t b = 0; b < cells.bins(); ++b) out.layers[b](r, c) = cells(r, c, b);
    return out;
}

HogLayers extract(const GrayImage& img, const HogConfig& cfg) {
    cfg.validate();
    const auto om = orientation_magnitude(gradients(img));
    return to_layers(block_normalize(cell_histograms(om, cfg), cfg));
}

}  // namespace hogface
