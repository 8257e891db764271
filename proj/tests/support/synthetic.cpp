#include "synthetic.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>

namespace hogface::testing {

GrayImage synthetic_face(std::size_t person, std::size_t variant, std::size_t rows, std::size_t cols) {
    std::mt19937_64 id_rng(0x9E3779B97F4A7C15ull * (person + 1));
    std::uniform_real_distribution<double> u(0.0, 1.0);

    struct Blob {
        double r, c, sigma, amp;
    };
    std::vector<Blob> blobs;
    const int count = 6 + static_cast<int>(u(id_rng) * 5);
    for (int i = 0; i < count; ++i) {
        blobs.push_back({0.2 + 0.6 * u(id_rng), 0.2 + 0.6 * u(id_rng), 0.04 + 0.08 * u(id_rng),
                         (u(id_rng) < 0.5 ? -1.0 : 1.0) * (40.0 + 60.0 * u(id_rng))});
    }
    const double face_w = 0.32 + 0.08 * u(id_rng);
    const double face_h = 0.40 + 0.06 * u(id_rng);
    const double skin = 110.0 + 50.0 * u(id_rng);

    std::mt19937_64 var_rng(0xD1B54A32D192ED03ull * (person + 1) + 0x2545F4914F6CDD1Dull * (variant + 1));
    std::normal_distribution<double> noise(0.0, 3.0);
    const double dr = (u(var_rng) - 0.5) * 4.0;
    const double dc = (u(var_rng) - 0.5) * 4.0;
    const double gain = 0.9 + 0.2 * u(var_rng);
    const double offset = (u(var_rng) - 0.5) * 20.0;

    GrayImage img(rows, cols);
    const double R = static_cast<double>(rows);
    const double C = static_cast<double>(cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double y = (static_cast<double>(r) - dr) / R;
            const double x = (static_cast<double>(c) - dc) / C;
            const double ey = (y - 0.5) / face_h;
            const double ex = (x - 0.5) / face_w;
            double v = (ey * ey + ex * ex) <= 1.0 ? skin : 40.0;
            for (const auto& b : blobs) {
                const double d2 = (y - b.r) * (y - b.r) + (x - b.c) * (x - b.c);
                v += b.amp * std::exp(-d2 / (2.0 * b.sigma * b.sigma));
            }
            v = gain * v + offset + noise(var_rng);
            img.at(r, c) = std::clamp(std::round(v), 0.0, 255.0);
        }
    }
    return img;
}

std::string person_label(std::size_t person) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "P%03zu", person);
    return buf;
}

void write_flat_dataset(const std::filesystem::path& dir, std::size_t persons, std::size_t variants,
                        std::size_t rows, std::size_t cols) {
    std::filesystem::create_directories(dir);
    for (std::size_t p = 0; p < persons; ++p)
        for (std::size_t v = 0; v < variants; ++v)
            write_pgm(dir / (person_label(p) + "." + std::to_string(v + 1) + ".pgm"), synthetic_face(p, v, rows, cols));
}

void write_orl_dataset(const std::filesystem::path& dir, std::size_t persons, std::size_t variants) {
    for (std::size_t p = 0; p < persons; ++p) {
        const auto sub = dir / ("s" + std::to_string(p + 1));
        std::filesystem::create_directories(sub);
        for (std::size_t v = 0; v < variants; ++v)
            write_pgm(sub / (std::to_string(v + 1) + ".pgm"), synthetic_face(p, v));
    }
}

Model train_synthetic_model(std::size_t first, std::size_t persons, std::size_t variants) {
    std::vector<GrayImage> images;
    std::vector<std::string> labels;
    std::vector<std::string> sources;
    for (std::size_t p = first; p < first + persons; ++p) {
        for (std::size_t v = 0; v < variants; ++v) {
            images.push_back(synthetic_face(p, v));
            labels.push_back(person_label(p));
            sources.push_back(labels.back() + "." + std::to_string(v + 1));
        }
    }
    const PipelineConfig cfg;
    return train_model(image_layers(images, cfg), labels, sources, cfg);
}

Matrix random_matrix(std::size_t rows, std::size_t cols, unsigned long long seed, double scale) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-scale, scale);
    Matrix m(rows, cols);
    for (auto& v : m.data()) v = u(rng);
    return m;
}

Matrix random_symmetric(std::size_t n, unsigned long long seed, double scale) {
    Matrix m = random_matrix(n, n, seed, scale);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) m(i, j) = m(j, i);
    return m;
}

TempDir::TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("hogface-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

}  // namespace hogface::testing
