#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hogface/hog.hpp"
#include "hogface/matrix.hpp"

namespace hogface {

/// Column-space image covariance G = (1/M) sum_j (A_j - mean)^T (A_j - mean).
struct ImageCovariance {
    Matrix g;
    std::size_t sample_count = 0;
};

/// Top-d eigenvectors as columns of a W x d matrix, eigenvalues nonincreasing.
struct ProjectionBasis {
    Matrix vectors;
    std::vector<double> eigenvalues;

    std::size_t input_cols() const noexcept { return vectors.rows(); }
    std::size_t dims() const noexcept { return vectors.cols(); }

    friend bool operator==(const ProjectionBasis&, const ProjectionBasis&) = default;
};

struct SymmetricEigen {
    std::vector<double> values;  ///< unsorted, in diagonal order
    Matrix vectors;              ///< column k pairs with values[k]
    int sweeps = 0;
};

/// Cyclic Jacobi rotations. Stops once the off-diagonal Frobenius norm drops
/// below 1e-12 * |A|_F or after 100 sweeps. Input must be square and symmetric.
SymmetricEigen jacobi_eigen(const Matrix& a);

Matrix mean_matrix(std::span<const Matrix> samples);

/// Only the upper triangle is accumulated; the lower is mirrored so G is exactly symmetric.
ImageCovariance image_covariance(std::span<const Matrix> samples, const Matrix& mean);

/// Unit eigenvectors for the d largest eigenvalues. Each column's largest-magnitude
/// entry (first on ties) is made positive. A zero covariance yields the first d
/// standard basis vectors with zero eigenvalues.
ProjectionBasis top_eigenvectors(const ImageCovariance& cov, std::size_t d);

/// Y = A * X.
Matrix project(const Matrix& a, const ProjectionBasis& basis);

/// One basis per orientation bin, each trained independently over that bin's
/// layers. Bins may be trained concurrently; results do not depend on `jobs`.
std::vector<ProjectionBasis> train_bases(std::span<const HogLayers> training, std::size_t d,
                                         std::size_t jobs = 1);

}  // namespace hogface
