#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace hogface {

/// Grayscale image, row-major intensities on an arbitrary nonnegative scale.
struct GrayImage {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    GrayImage() = default;
    GrayImage(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
    GrayImage(std::size_t r, std::size_t c, std::vector<double> values);

    double& at(std::size_t r, std::size_t c) noexcept { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const noexcept { return data[r * cols + c]; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

/// Decodes binary (P5) or ASCII (P2) PGM. Samples are returned as stored,
/// without rescaling to maxval. 16-bit P5 samples are big-endian.
/// Throws DecodeError naming the byte offset of the failure.
GrayImage decode_pgm(std::span<const std::uint8_t> bytes);

/// Encodes as binary P5. Values are rounded and clamped to [0, maxval];
/// maxval > 255 selects 16-bit big-endian samples.
std::vector<std::uint8_t> encode_pgm(const GrayImage& img, unsigned maxval = 255);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& img, unsigned maxval = 255);

/// Bilinear resampling with corner-aligned sample positions and edge clamping.
GrayImage resize_to(const GrayImage& img, std::size_t rows, std::size_t cols);

/// Single-level 2D Haar decomposition, LL subband only, block-average normalized.
/// Both dimensions must be even.
GrayImage haar_dwt_ll(const GrayImage& img);

}  // namespace hogface
