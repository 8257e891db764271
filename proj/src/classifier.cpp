#include "hogface/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hogface/errors.hpp"
#include "hogface/parallel.hpp"

namespace hogface {

double bin_distance(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw ArgumentError("bin features differ in shape: " + shape_string(a) + " vs " + shape_string(b));
    }
    double total = 0.0;
    for (std::size_t k = 0; k < a.cols(); ++k) {
        double sq = 0.0;
        for (std::size_t r = 0; r < a.rows(); ++r) {
            const double diff = a(r, k) - b(r, k);
            sq += diff * diff;
        }
        total += std::sqrt(sq);
    }
    return total;
}

BinVote bin_vote(const Matrix& query, std::span<const GalleryEntry> gallery, std::size_t bin) {
    if (gallery.empty()) throw StateError("cannot vote against an empty gallery");
    BinVote best{{}, std::numeric_limits<double>::infinity(), 0};
    for (std::size_t i = 0; i < gallery.size(); ++i) {
        if (bin >= gallery[i].features.size()) {
            throw StateError("gallery entry " + std::to_string(i) + " has no bin " + std::to_string(bin));
        }
        const double d = bin_distance(query, gallery[i].features[bin]);
        if (d < best.distance) best = {gallery[i].label, d, i};
    }
    if (!std::isfinite(best.distance)) best = {gallery.front().label, best.distance, 0};
    return best;
}

std::vector<Matrix> project_layers(const HogLayers& layers, std::span<const ProjectionBasis> bases) {
    if (layers.bins() != bases.size()) {
        throw StateError("query has " + std::to_string(layers.bins()) + " layers but the model has " +
                         std::to_string(bases.size()) + " bases");
    }
    std::vector<Matrix> out;
    out.reserve(bases.size());
    for (std::size_t b = 0; b < bases.size(); ++b) {
        if (layers.layers[b].cols() != bases[b].input_cols()) {
            throw StateError("bin " + std::to_string(b) + ": layer " + shape_string(layers.layers[b]) +
                             " does not fit a basis over " + std::to_string(bases[b].input_cols()) + " columns");
        }
        out.push_back(project(layers.layers[b], bases[b]));
    }
    return out;
}

GalleryEntry make_entry(const HogLayers& layers, std::span<const ProjectionBasis> bases, std::string label,
                        std::string source_id) {
    return {std::move(label), project_layers(layers, bases), std::move(source_id)};
}

MatchResult classify_features(std::span<const Matrix> query, std::span<const GalleryEntry* const> gallery,
                              std::size_t jobs) {
    if (gallery.empty()) throw StateError("cannot classify against an empty gallery");
    const std::size_t bins = query.size();
    for (std::size_t i = 0; i < gallery.size(); ++i) {
        if (gallery[i]->features.size() != bins) {
            throw StateError("gallery entry " + std::to_string(i) + " has " +
                             std::to_string(gallery[i]->features.size()) + " bins, query has " +
                             std::to_string(bins));
        }
        for (std::size_t b = 0; b < bins; ++b) {
            if (!gallery[i]->features[b].same_shape(query[b])) {
                throw StateError("bin " + std::to_string(b) + ": query features " + shape_string(query[b]) +
                                 " do not match gallery features " + shape_string(gallery[i]->features[b]));
            }
        }
    }

    // distances[b][i]: bin b, gallery entry i.
    std::vector<std::vector<double>> distances(bins, std::vector<double>(gallery.size()));
    parallel_for(bins, jobs, [&](std::size_t b) {
        for (std::size_t i = 0; i < gallery.size(); ++i) distances[b][i] = bin_distance(query[b], gallery[i]->features[b]);
    });

    MatchResult result;
    for (const auto* e : gallery) {
        result.votes.emplace(e->label, 0);
        result.total_distance.emplace(e->label, 0.0);
    }
    result.per_bin.reserve(bins);
    std::map<std::string, double> class_best;
    for (std::size_t b = 0; b < bins; ++b) {
        const auto& row = distances[b];
        std::size_t nearest = 0;
        for (std::size_t i = 1; i < row.size(); ++i)
            if (row[i] < row[nearest]) nearest = i;
        result.per_bin.push_back({gallery[nearest]->label, row[nearest], nearest});
        ++result.votes[gallery[nearest]->label];

        class_best.clear();
        for (std::size_t i = 0; i < row.size(); ++i) {
            auto [it, fresh] = class_best.emplace(gallery[i]->label, row[i]);
            if (!fresh) it->second = std::min(it->second, row[i]);
        }
        for (const auto& [label, d] : class_best) result.total_distance[label] += d;
    }

    const auto ranked = rank_result(result, 1);
    result.label = ranked.front().label;
    return result;
}

MatchResult classify_features(std::span<const Matrix> query, std::span<const GalleryEntry> gallery,
                              std::size_t jobs) {
    std::vector<const GalleryEntry*> view;
    view.reserve(gallery.size());
    for (const auto& e : gallery) view.push_back(&e);
    return classify_features(query, std::span<const GalleryEntry* const>(view), jobs);
}

MatchResult classify(const HogLayers& query, std::span<const ProjectionBasis> bases,
                     std::span<const GalleryEntry> gallery, std::size_t jobs) {
    if (gallery.empty()) throw StateError("cannot classify against an empty gallery");
    const auto features = project_layers(query, bases);
    return classify_features(features, gallery, jobs);
}

std::vector<RankedLabel> rank_result(const MatchResult& result, std::size_t k) {
    if (k < 1) throw ArgumentError("rank needs k >= 1");
    std::vector<RankedLabel> out;
    out.reserve(result.votes.size());
    for (const auto& [label, votes] : result.votes) {
        const double total = result.total_distance.at(label);
        out.push_back({label, static_cast<double>(votes) + 1.0 / (1.0 + total), votes, total});
    }
    // map iteration is already label-ascending, so stable_sort settles the final tie.
    std::stable_sort(out.begin(), out.end(), [](const RankedLabel& a, const RankedLabel& b) {
        if (a.votes != b.votes) return a.votes > b.votes;
        return a.total_distance < b.total_distance;
    });
    if (out.size() > k) out.resize(k);
    return out;
}

std::vector<RankedLabel> rank(const HogLayers& query, std::span<const ProjectionBasis> bases,
                              std::span<const GalleryEntry> gallery, std::size_t k, std::size_t jobs) {
    if (k < 1) throw ArgumentError("rank needs k >= 1");
    return rank_result(classify(query, bases, gallery, jobs), k);
}

}  // namespace hogface
