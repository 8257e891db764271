#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hogface/hog.hpp"
#include "hogface/pca2d.hpp"

namespace hogface {

/// One enrolled training image: its label and projected features for every bin.
struct GalleryEntry {
    std::string label;
    std::vector<Matrix> features;
    std::string source_id;

    friend bool operator==(const GalleryEntry&, const GalleryEntry&) = default;
};

struct BinVote {
    std::string label;
    double distance = 0.0;
    std::size_t entry = 0;  ///< gallery index of the nearest entry
};

struct MatchResult {
    std::string label;
    std::map<std::string, std::size_t> votes;  ///< every gallery class, including zero-vote ones
    std::vector<BinVote> per_bin;
    std::map<std::string, double> total_distance;
};

struct RankedLabel {
    std::string label;
    double score = 0.0;  ///< votes + 1 / (1 + total_distance)
    std::size_t votes = 0;
    double total_distance = 0.0;
};

/// Sum over projected columns of the column-wise L2 distance.
double bin_distance(const Matrix& a, const Matrix& b);

/// Nearest gallery entry at one bin; the earliest entry wins exact ties.
BinVote bin_vote(const Matrix& query, std::span<const GalleryEntry> gallery, std::size_t bin);

/// Projects every layer with its bin's basis.
std::vector<Matrix> project_layers(const HogLayers& layers, std::span<const ProjectionBasis> bases);

GalleryEntry make_entry(const HogLayers& layers, std::span<const ProjectionBasis> bases, std::string label,
                        std::string source_id);

/// Votes over already projected query features. Throws StateError on an empty
/// gallery or a feature shape mismatch (naming the bin).
MatchResult classify_features(std::span<const Matrix> query, std::span<const GalleryEntry> gallery,
                              std::size_t jobs = 1);

/// Same, over a non-owning view of entries (e.g. a filtered subset).
MatchResult classify_features(std::span<const Matrix> query, std::span<const GalleryEntry* const> gallery,
                              std::size_t jobs = 1);

/// Each bin votes for its nearest entry's label; most votes wins, then the
/// smallest total distance, then the lexicographically smallest label.
MatchResult classify(const HogLayers& query, std::span<const ProjectionBasis> bases,
                     std::span<const GalleryEntry> gallery, std::size_t jobs = 1);

/// All classes in classify() order, truncated to k.
std::vector<RankedLabel> rank_result(const MatchResult& result, std::size_t k);

std::vector<RankedLabel> rank(const HogLayers& query, std::span<const ProjectionBasis> bases,
                              std::span<const GalleryEntry> gallery, std::size_t k, std::size_t jobs = 1);

}  // namespace hogface
