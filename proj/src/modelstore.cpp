#include "hogface/modelstore.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <iterator>
#include <ostream>

#include "hogface/binary_io.hpp"
#include "hogface/errors.hpp"
#include "hogface/imgio.hpp"

namespace hogface {

namespace {

constexpr std::uint8_t kMagic[4] = {'2', 'D', 'H', 'G'};
constexpr std::uint32_t kFlagDwt = 1u << 0;
constexpr std::uint32_t kFlagRaw = 1u << 1;
constexpr std::size_t kMinimumSize = 4 + 4 + 7 * 4 + 8 + 4 + 8;

using Kind = ModelLoadError::Kind;

std::uint32_t to_u32(std::size_t v, const char* what) {
    if (v > 0xFFFFFFFFu) throw ArgumentError(std::string(what) + " does not fit in 32 bits");
    return static_cast<std::uint32_t>(v);
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const Model& model) {
    model.check_consistent();
    const auto& cfg = model.config;
    ByteWriter w;
    w.raw(kMagic);
    w.u32(kModelVersion);
    w.u32(to_u32(cfg.rows, "rows"));
    w.u32(to_u32(cfg.cols, "cols"));
    w.u32((cfg.dwt ? kFlagDwt : 0) | (cfg.mode == FeatureMode::raw ? kFlagRaw : 0));
    w.u32(to_u32(cfg.hog.cell, "cell"));
    w.u32(to_u32(cfg.hog.block, "block"));
    w.u32(to_u32(cfg.hog.bins, "bins"));
    w.u32(to_u32(cfg.dims, "dims"));
    w.f64(cfg.hog.epsilon);
    for (const auto& basis : model.bases) {
        w.matrix(basis.vectors);
        w.doubles(basis.eigenvalues);
    }
    w.u32(to_u32(model.gallery.size(), "gallery size"));
    for (const auto& e : model.gallery) {
        w.str(e.label);
        w.str(e.source_id);
        for (const auto& f : e.features) w.matrix(f);
    }
    w.u64(byte_sum(w.bytes()));
    return std::move(w.bytes());
}

Model deserialize_model(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kMinimumSize) {
        throw ModelLoadError(Kind::truncated, "model file is truncated (" + std::to_string(bytes.size()) + " bytes)");
    }
    const auto body = bytes.first(bytes.size() - 8);
    ByteReader tail(bytes.last(8));
    if (tail.u64() != byte_sum(body)) throw ModelLoadError(Kind::bad_checksum, "model checksum mismatch");
    if (!std::equal(std::begin(kMagic), std::end(kMagic), body.begin())) {
        throw ModelLoadError(Kind::bad_magic, "not a model file (bad magic)");
    }

    ByteReader r(body.subspan(4));
    try {
        const auto version = r.u32();
        if (version != kModelVersion) {
            throw ModelLoadError(Kind::bad_version, "unsupported model version " + std::to_string(version));
        }
        Model m;
        auto& cfg = m.config;
        cfg.rows = r.u32();
        cfg.cols = r.u32();
        const auto flags = r.u32();
        if ((flags & ~(kFlagDwt | kFlagRaw)) != 0) {
            throw ModelLoadError(Kind::bad_dims, "unknown config flags " + std::to_string(flags));
        }
        cfg.dwt = (flags & kFlagDwt) != 0;
        cfg.mode = (flags & kFlagRaw) != 0 ? FeatureMode::raw : FeatureMode::hog2d;
        cfg.hog.cell = r.u32();
        cfg.hog.block = r.u32();
        cfg.hog.bins = r.u32();
        cfg.dims = r.u32();
        cfg.hog.epsilon = r.f64();
        try {
            cfg.validate();
        } catch (const ArgumentError& e) {
            throw ModelLoadError(Kind::bad_dims, std::string("invalid model config: ") + e.what());
        }

        const std::size_t layers = cfg.layer_count();
        for (std::size_t b = 0; b < layers; ++b) {
            ProjectionBasis basis;
            basis.vectors = r.matrix();
            basis.eigenvalues = r.doubles();
            m.bases.push_back(std::move(basis));
        }
        const std::size_t count = r.u32();
        // Each entry needs at least its two length prefixes and per-layer matrix headers.
        if (count > r.remaining() / (8 + 8 * layers)) {
            throw ModelLoadError(Kind::truncated, "gallery count " + std::to_string(count) + " exceeds file size");
        }
        m.gallery.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            GalleryEntry e;
            e.label = r.str();
            e.source_id = r.str();
            for (std::size_t b = 0; b < layers; ++b) e.features.push_back(r.matrix());
            m.gallery.push_back(std::move(e));
        }
        if (r.remaining() != 0) {
            throw ModelLoadError(Kind::bad_dims, std::to_string(r.remaining()) + " unexpected trailing bytes");
        }
        try {
            m.check_consistent();
        } catch (const StateError& e) {
            throw ModelLoadError(Kind::bad_dims, std::string("inconsistent model: ") + e.what());
        }
        return m;
    } catch (const TruncatedInput& e) {
        throw ModelLoadError(Kind::truncated, std::string("model file is truncated: ") + e.what());
    } catch (const ArgumentError& e) {
        throw ModelLoadError(Kind::bad_dims, std::string("invalid model dimensions: ") + e.what());
    }
}

std::size_t save_model(const Model& model, std::ostream& sink) {
    const auto bytes = serialize_model(model);
    sink.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    sink.flush();
    if (!sink) throw IoError("failed to write model to stream");
    return bytes.size();
}

Model load_model(std::istream& source) {
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(source)), std::istreambuf_iterator<char>());
    return deserialize_model(bytes);
}

std::size_t save_model_file(const Model& model, const std::filesystem::path& path) {
    const auto bytes = serialize_model(model);
    write_file_atomic(path, bytes);
    return bytes.size();
}

Model load_model_file(const std::filesystem::path& path) { return deserialize_model(read_file_bytes(path)); }

std::string model_version_tag(std::span<const std::uint8_t> model_bytes) {
    if (model_bytes.size() < 8) return "unknown";
    ByteReader r(model_bytes.last(8));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(r.u64()));
    return buf;
}

}  // namespace hogface
