#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "hogface/imgio.hpp"
#include "hogface/matrix.hpp"
#include "hogface/pipeline.hpp"

namespace hogface::testing {

/// Deterministic face-like test image: a per-person arrangement of Gaussian blobs
/// on an elliptical face, with per-variant shift, gain and noise. Integer intensities
/// in [0, 255] so PGM round trips are exact.
GrayImage synthetic_face(std::size_t person, std::size_t variant, std::size_t rows = 112, std::size_t cols = 92);

/// Writes persons x variants images as "<label>.<variant>.pgm" into dir (the flat layout).
void write_flat_dataset(const std::filesystem::path& dir, std::size_t persons, std::size_t variants,
                        std::size_t rows = 112, std::size_t cols = 92);

/// Writes an ORL-style tree dir/s<p>/<v>.pgm.
void write_orl_dataset(const std::filesystem::path& dir, std::size_t persons, std::size_t variants);

std::string person_label(std::size_t person);

/// Model trained on persons [first, first + persons) with `variants` images each, default pipeline.
Model train_synthetic_model(std::size_t first, std::size_t persons, std::size_t variants);

Matrix random_matrix(std::size_t rows, std::size_t cols, unsigned long long seed, double scale = 1.0);
Matrix random_symmetric(std::size_t n, unsigned long long seed, double scale = 1.0);

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace hogface::testing
