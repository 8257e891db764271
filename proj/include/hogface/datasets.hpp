#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hogface/imgio.hpp"

namespace hogface {

enum class Layout { orl, umist, jaffe, flat };

Layout parse_layout(std::string_view name);
std::string_view layout_name(Layout layout);

struct LabeledImage {
    std::string label;
    std::size_t index = 0;  ///< 1-based position within its class
    GrayImage image;
    std::string path;
};

/// Loads and sorts by (label, index).
///  orl:   root/s<N>/<i>.pgm, index i
///  umist: one subdirectory per subject, every .pgm inside, index by filename order
///  jaffe, flat: a single directory; label = filename up to the first '.', index by filename order
/// Throws LoadError on a missing root, zero images, or an unreadable file.
std::vector<LabeledImage> load_dataset(const std::filesystem::path& root, Layout layout);

struct SplitProtocol {
    enum class Kind { first_k_train, leave_one_out };
    Kind kind = Kind::first_k_train;
    std::size_t value = 5;  ///< k for first_k_train, the held-out index for leave_one_out

    static SplitProtocol first_k(std::size_t k) { return {Kind::first_k_train, k}; }
    static SplitProtocol leave_one_out(std::size_t held) { return {Kind::leave_one_out, held}; }
};

/// Positions into the dataset vector.
struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Throws ArgumentError naming the first class the protocol cannot be applied to.
Split split(const std::vector<LabeledImage>& dataset, const SplitProtocol& protocol);

/// Leave-one-out over every image: fold i holds out dataset[i] alone.
class LooSweep {
public:
    /// Throws ArgumentError if any class has a single image.
    explicit LooSweep(const std::vector<LabeledImage>& dataset);

    std::size_t size() const noexcept { return count_; }
    Split fold(std::size_t i) const;

private:
    std::size_t count_ = 0;
};

/// Class sizes keyed by label.
std::vector<std::pair<std::string, std::size_t>> class_sizes(const std::vector<LabeledImage>& dataset);

/// Renumbers each class's indices with a seeded permutation, then re-sorts.
void shuffle_within_classes(std::vector<LabeledImage>& dataset, std::uint64_t seed);

}  // namespace hogface
