#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hogface/datasets.hpp"
#include "hogface/pipeline.hpp"

namespace hogface {

/// Train/test protocol of a benchmark run.
struct Protocol {
    enum class Kind {
        first_k,   ///< per class, the first k images train and the rest test
        loo,       ///< leave-one-out over every image
        self,      ///< train on everything, test on everything
    };
    Kind kind = Kind::first_k;
    std::size_t k = 5;

    /// Accepts "first<K>", "I" (first5), "II" (first3), "III"/"loo", "self".
    static Protocol parse(const std::string& text);
    std::string name() const;
};

/// One row of a benchmark report.
struct BenchRow {
    std::string dataset;
    std::string protocol;
    std::string mode;
    std::size_t bins = 0;
    std::size_t dims = 0;
    std::string feature_shape;
    std::size_t train_images = 0;
    std::size_t test_images = 0;
    std::size_t correct = 0;
    double accuracy = 0.0;
    std::optional<double> published_target;
    std::optional<std::uint64_t> shuffle_seed;
    std::size_t model_bytes = 0;
    std::string confusion;  ///< most frequent "true>predicted:count" pairs, ';'-separated
    double train_seconds = 0.0;
    double test_ms_per_image = 0.0;
    std::string error;  ///< set when the row could not be produced
};

struct RunOptions {
    std::size_t jobs = 1;
    std::optional<std::uint64_t> shuffle_seed;
};

/// Runs one protocol end to end on a loaded dataset.
BenchRow run_experiment(const std::string& dataset_name, const std::vector<LabeledImage>& dataset,
                        const Protocol& protocol, const PipelineConfig& cfg, const RunOptions& opts = {});

/// Classifies `images` against a trained model. Accuracy is deterministic in `jobs`.
BenchRow evaluate_model(const Model& model, const std::string& dataset_name,
                        const std::vector<LabeledImage>& images, std::size_t jobs = 1);

/// Published 2D-HOG/2DPCA accuracy for (dataset, protocol), when one exists.
std::optional<double> published_target(const std::string& dataset, const Protocol& protocol);

/// Fixed header and column order; timing columns come last.
std::string csv_header();
std::string csv_row(const BenchRow& row);
void write_table(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace hogface
