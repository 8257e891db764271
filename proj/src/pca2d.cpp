#include "hogface/pca2d.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hogface/errors.hpp"
#include "hogface/parallel.hpp"

namespace hogface {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kRelativeTolerance = 1e-12;

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

}  // namespace

SymmetricEigen jacobi_eigen(const Matrix& input) {
    if (input.rows() != input.cols() || input.empty()) {
        throw ArgumentError("Jacobi eigensolver needs a nonempty square matrix, got " + shape_string(input));
    }
    const std::size_t n = input.rows();
    Matrix a = input;
    Matrix v = Matrix::identity(n);
    const double threshold = kRelativeTolerance * frobenius_norm(input);

    int sweep = 0;
    for (; sweep < kMaxSweeps; ++sweep) {
        if (off_diagonal_norm(a) <= threshold) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                // Rotation annihilating a(p,q); t is the smaller root of t^2 + 2*tau*t - 1 = 0.
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    SymmetricEigen out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
    out.vectors = std::move(v);
    out.sweeps = sweep;
    return out;
}

Matrix mean_matrix(std::span<const Matrix> samples) {
    if (samples.empty()) throw ArgumentError("mean of an empty sample list");
    // Accumulate offsets from the first sample; identical samples give that sample back exactly.
    const Matrix& ref = samples.front();
    Matrix mean(ref.rows(), ref.cols());
    auto m = mean.data();
    const auto r = ref.data();
    for (const auto& s : samples) {
        if (!s.same_shape(mean)) {
            throw ArgumentError("ragged samples: " + shape_string(s) + " vs " + shape_string(mean));
        }
        const auto d = s.data();
        for (std::size_t i = 0; i < m.size(); ++i) m[i] += d[i] - r[i];
    }
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = r[i] + m[i] / n;
    return mean;
}

ImageCovariance image_covariance(std::span<const Matrix> samples, const Matrix& mean) {
    if (samples.empty()) throw ArgumentError("covariance of an empty sample list");
    const std::size_t h = mean.rows();
    const std::size_t w = mean.cols();
    ImageCovariance cov{Matrix(w, w), samples.size()};
    std::vector<double> centered(h * w);
    for (const auto& s : samples) {
        if (!s.same_shape(mean)) {
            throw ArgumentError("sample " + shape_string(s) + " does not match mean " + shape_string(mean));
        }
        for (std::size_t i = 0; i < centered.size(); ++i) centered[i] = s.data()[i] - mean.data()[i];
        for (std::size_t i = 0; i < w; ++i) {
            for (std::size_t j = i; j < w; ++j) {
                double acc = 0.0;
                for (std::size_t r = 0; r < h; ++r) acc += centered[r * w + i] * centered[r * w + j];
                cov.g(i, j) += acc;
            }
        }
    }
    const double inv = 1.0 / static_cast<double>(samples.size());
    for (std::size_t i = 0; i < w; ++i) {
        for (std::size_t j = i; j < w; ++j) {
            cov.g(i, j) *= inv;
            cov.g(j, i) = cov.g(i, j);
        }
    }
    return cov;
}

ProjectionBasis top_eigenvectors(const ImageCovariance& cov, std::size_t d) {
    const std::size_t w = cov.g.rows();
    if (cov.g.cols() != w || w == 0) throw ArgumentError("covariance must be square, got " + shape_string(cov.g));
    if (d < 1 || d > w) {
        throw ArgumentError("requested " + std::to_string(d) + " eigenvectors of a " + std::to_string(w) + "x" +
                            std::to_string(w) + " covariance");
    }

    ProjectionBasis basis{Matrix(w, d), std::vector<double>(d, 0.0)};
    if (frobenius_norm(cov.g) == 0.0) {
        for (std::size_t k = 0; k < d; ++k) basis.vectors(k, k) = 1.0;
        return basis;
    }

    const auto eig = jacobi_eigen(cov.g);
    std::vector<std::size_t> order(w);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return eig.values[a] > eig.values[b]; });

    for (std::size_t k = 0; k < d; ++k) {
        const std::size_t src = order[k];
        double norm = 0.0;
        std::size_t peak = 0;
        for (std::size_t i = 0; i < w; ++i) {
            const double x = eig.vectors(i, src);
            norm += x * x;
            // Near-equal magnitudes count as ties so the first entry keeps priority.
            if (std::abs(x) > std::abs(eig.vectors(peak, src)) * (1.0 + 1e-9)) peak = i;
        }
        norm = std::sqrt(norm);
        const double sign = eig.vectors(peak, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < w; ++i) basis.vectors(i, k) = sign * eig.vectors(i, src) / norm;
        // PSD by construction; negative values are round-off.
        basis.eigenvalues[k] = std::max(0.0, eig.values[src]);
    }
    return basis;
}

Matrix project(const Matrix& a, const ProjectionBasis& basis) {
    if (a.cols() != basis.input_cols()) {
        throw ArgumentError("cannot project " + shape_string(a) + " with a basis for " +
                            std::to_string(basis.input_cols()) + " columns");
    }
    return multiply(a, basis.vectors);
}

std::vector<ProjectionBasis> train_bases(std::span<const HogLayers> training, std::size_t d, std::size_t jobs) {
    if (training.size() < 2) throw ArgumentError("training needs at least 2 images");
    const std::size_t bins = training.front().bins();
    if (bins == 0) throw ArgumentError("training images carry no layers");
    for (const auto& t : training) {
        if (t.bins() != bins || t.rows() != training.front().rows() || t.cols() != training.front().cols()) {
            throw ArgumentError("training layers are not uniform in shape");
        }
    }

    std::vector<ProjectionBasis> bases(bins);
    parallel_for(bins, jobs, [&](std::size_t b) {
        std::vector<Matrix> samples;
        samples.reserve(training.size());
        for (const auto& t : training) samples.push_back(t.layers[b]);
        const Matrix mean = mean_matrix(samples);
        bases[b] = top_eigenvectors(image_covariance(samples, mean), d);
    });
    return bases;
}

}  // namespace hogface
