#include <doctest.h>

#include <bit>
#include <cstring>
#include <random>
#include <sstream>

#include "hogface/binary_io.hpp"
#include "hogface/errors.hpp"
#include "hogface/modelstore.hpp"
#include "support/synthetic.hpp"

using namespace hogface;

namespace {

/// Random but internally consistent model; geometry drawn within small limits.
Model random_model(unsigned long long seed) {
    std::mt19937_64 rng(seed);
    auto pick = [&](std::size_t lo, std::size_t hi) { return lo + rng() % (hi - lo + 1); };
    Model m;
    PipelineConfig& c = m.config;
    c.hog.cell = pick(2, 4);
    c.hog.block = pick(1, 2);
    c.hog.bins = pick(2, 12);
    c.hog.epsilon = std::ldexp(1.0, -static_cast<int>(pick(5, 40)));
    c.dwt = rng() % 2 == 0;
    c.mode = rng() % 4 == 0 ? FeatureMode::raw : FeatureMode::hog2d;
    const std::size_t unit = c.mode == FeatureMode::raw ? 1 : c.hog.cell * c.hog.block;
    const std::size_t scale = c.dwt ? 2 : 1;
    c.rows = unit * scale * pick(1, 3);
    c.cols = unit * scale * pick(1, 3);
    if (c.mode == FeatureMode::raw) {
        c.rows = std::max<std::size_t>(c.rows, 2 * scale);
        c.cols = std::max<std::size_t>(c.cols, 2 * scale);
    }
    c.dims = pick(1, c.layer_cols());
    for (std::size_t b = 0; b < c.layer_count(); ++b) {
        ProjectionBasis basis;
        basis.vectors = testing::random_matrix(c.layer_cols(), c.dims, rng());
        for (std::size_t k = 0; k < c.dims; ++k) basis.eigenvalues.push_back(std::ldexp(static_cast<double>(rng() % 1000), -7));
        m.bases.push_back(basis);
    }
    const std::size_t entries = pick(0, 6);
    for (std::size_t e = 0; e < entries; ++e) {
        GalleryEntry g;
        g.label = "lbl-" + std::to_string(rng() % 5) + "-\xC3\xA9";
        g.source_id = e % 2 ? "" : "src/" + std::to_string(e);
        for (std::size_t b = 0; b < c.layer_count(); ++b)
            g.features.push_back(testing::random_matrix(c.layer_rows(), c.dims, rng(), 1e3));
        m.gallery.push_back(g);
    }
    m.check_consistent();
    return m;
}

bool bit_identical(const Model& a, const Model& b) {
    const auto sa = serialize_model(a);
    const auto sb = serialize_model(b);
    if (sa != sb) return false;
    if (!(a == b)) return false;
    // == on doubles would accept -0.0 vs 0.0; compare raw bits too
    for (std::size_t l = 0; l < a.bases.size(); ++l)
        if (std::memcmp(a.bases[l].vectors.data().data(), b.bases[l].vectors.data().data(),
                        a.bases[l].vectors.size() * sizeof(double)) != 0)
            return false;
    return true;
}

ModelLoadError::Kind load_kind(const std::vector<std::uint8_t>& bytes) {
    try {
        deserialize_model(bytes);
    } catch (const ModelLoadError& e) {
        return e.kind();
    }
    FAIL("expected ModelLoadError");
    return ModelLoadError::Kind::truncated;
}

/// Recomputes the trailing checksum after an intentional edit.
void reseal(std::vector<std::uint8_t>& bytes) {
    bytes.resize(bytes.size() - 8);
    const std::uint64_t sum = byte_sum(bytes);
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(sum >> (8 * i)));
}

}  // namespace

TEST_CASE("property: round trip is bit-identical") {
    for (unsigned long long seed = 1; seed <= 60; ++seed) {
        const Model m = random_model(seed);
        const auto bytes = serialize_model(m);
        const Model back = deserialize_model(bytes);
        CHECK(bit_identical(m, back));
        CHECK(serialize_model(back) == bytes);
    }
}

TEST_CASE("saving is deterministic and reports the byte count") {
    const Model m = random_model(99);
    std::ostringstream a;
    std::ostringstream b;
    const std::size_t n = save_model(m, a);
    save_model(m, b);
    CHECK(a.str() == b.str());
    CHECK(n == a.str().size());
    std::istringstream in(a.str());
    CHECK(load_model(in) == m);
}

TEST_CASE("file layout begins with magic, version and config") {
    const Model m = random_model(5);
    const auto bytes = serialize_model(m);
    REQUIRE(bytes.size() > 44);
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "2DHG");
    ByteReader r(bytes);
    r.skip(4);
    CHECK(r.u32() == 1);
    CHECK(r.u32() == m.config.rows);
    CHECK(r.u32() == m.config.cols);
    CHECK(r.u32() == ((m.config.dwt ? 1u : 0u) | (m.config.mode == FeatureMode::raw ? 2u : 0u)));
    CHECK(r.u32() == m.config.hog.cell);
    CHECK(r.u32() == m.config.hog.block);
    CHECK(r.u32() == m.config.layer_count());
    CHECK(r.u32() == m.config.dims);
    CHECK(r.f64() == m.config.hog.epsilon);
    const std::span<const std::uint8_t> all(bytes);
    ByteReader tail(all.subspan(bytes.size() - 8));
    CHECK(tail.u64() == byte_sum(all.first(bytes.size() - 8)));
}

TEST_CASE("default geometry size arithmetic") {
    // 9 bins, 14x12 layers, d = 10, 200 entries: the first-five ORL model shape
    Model m;
    for (std::size_t b = 0; b < 9; ++b) m.bases.push_back({testing::random_matrix(12, 10, b), std::vector<double>(10, 1.0)});
    std::size_t label_bytes = 0;
    for (std::size_t e = 0; e < 200; ++e) {
        GalleryEntry g;
        g.label = "s" + std::to_string(e / 5 + 1);
        g.source_id = g.label + "/" + std::to_string(e % 5 + 1) + ".pgm";
        label_bytes += g.label.size() + g.source_id.size();
        for (std::size_t b = 0; b < 9; ++b) g.features.push_back(Matrix(14, 10, 0.5));
        m.gallery.push_back(g);
    }
    m.check_consistent();
    const std::size_t header = 8 + 7 * 4 + 8;
    const std::size_t per_basis = (8 + 12 * 10 * 8) + (4 + 10 * 8);
    const std::size_t per_entry_features = 9 * (8 + 14 * 10 * 8);
    CHECK(header == 44);
    CHECK(per_basis == 1052);
    CHECK(serialize_model(m).size() == header + 9 * per_basis + 4 + 200 * (8 + per_entry_features) + label_bytes + 8);
}

TEST_CASE("load failures are named") {
    const auto good = serialize_model(random_model(11));

    // the checksum is verified first, so a cut stream usually surfaces as a checksum error
    for (std::size_t cut : {std::size_t{0}, std::size_t{3}, std::size_t{20}, good.size() / 2, good.size() - 1}) {
        const std::vector<std::uint8_t> truncated(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(cut));
        const auto kind = load_kind(truncated);
        CHECK((kind == ModelLoadError::Kind::truncated || kind == ModelLoadError::Kind::bad_checksum));
    }
    CHECK(load_kind({}) == ModelLoadError::Kind::truncated);
    for (std::size_t cut : {std::size_t{30}, std::size_t{60}, good.size() / 2}) {
        std::vector<std::uint8_t> resealed(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(cut));
        resealed.resize(resealed.size() + 8);
        reseal(resealed);
        CHECK(load_kind(resealed) == ModelLoadError::Kind::truncated);
    }

    for (std::size_t pos = 0; pos < good.size(); pos += 1 + good.size() / 97) {
        auto flipped = good;
        flipped[pos] ^= 0x10;
        CHECK(load_kind(flipped) == ModelLoadError::Kind::bad_checksum);
    }

    auto magic = good;
    magic[0] = 'X';
    reseal(magic);
    CHECK(load_kind(magic) == ModelLoadError::Kind::bad_magic);

    auto version = good;
    version[4] = 2;
    reseal(version);
    CHECK(load_kind(version) == ModelLoadError::Kind::bad_version);

    auto dims = good;
    dims[8 + 6 * 4] = 0;  // d = 0
    dims[8 + 6 * 4 + 1] = 0;
    reseal(dims);
    CHECK(load_kind(dims) == ModelLoadError::Kind::bad_dims);

    auto extra = good;
    extra.insert(extra.end() - 8, 0);
    reseal(extra);
    CHECK(load_kind(extra) == ModelLoadError::Kind::bad_dims);
}

TEST_CASE("file save is atomic and loadable; tag tracks content") {
    testing::TempDir dir("model");
    const Model m = random_model(21);
    const auto path = dir.path() / ("m" + std::string(kModelExtension));
    const std::size_t n = save_model_file(m, path);
    CHECK(std::filesystem::file_size(path) == n);
    CHECK(load_model_file(path) == m);
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++entries;
    CHECK(entries == 1);

    const auto bytes = serialize_model(m);
    CHECK(model_version_tag(bytes).size() == 16);
    CHECK(model_version_tag(bytes) != model_version_tag(serialize_model(random_model(22))));
    CHECK_THROWS(load_model_file(dir.path() / "absent.2dhg"));
}
