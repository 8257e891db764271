#include "hogface/imgio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "hogface/errors.hpp"

namespace hogface {

GrayImage::GrayImage(std::size_t r, std::size_t c, std::vector<double> values)
    : rows(r), cols(c), data(std::move(values)) {
    if (data.size() != rows * cols) throw ArgumentError("image data length does not match dimensions");
}

namespace {

// Cursor over a PGM header: whitespace and '#' comments between tokens.
class HeaderReader {
public:
    explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t pos() const noexcept { return pos_; }
    void advance(std::size_t n) noexcept { pos_ += n; }

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            const auto ch = bytes_[pos_];
            if (ch == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
            } else if (std::isspace(ch)) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    /// Offset of the most recently read token.
    std::size_t token_start() const noexcept { return token_start_; }

    unsigned long read_uint(const char* what) {
        skip_space_and_comments();
        const std::size_t start = pos_;
        token_start_ = start;
        unsigned long value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 0xFFFFFFFFul) throw DecodeError(std::string("PGM ") + what + " out of range", start);
            ++pos_;
        }
        if (pos_ == start) {
            if (pos_ >= bytes_.size()) throw DecodeError(std::string("truncated PGM, expected ") + what, pos_);
            throw DecodeError(std::string("malformed PGM ") + what, pos_);
        }
        return value;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
    std::size_t token_start_ = 0;
};

}  // namespace

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2) throw DecodeError("truncated PGM magic", bytes.size());
    if (bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
        throw DecodeError("unsupported magic, expected P2 or P5", 0);
    }
    const bool ascii = bytes[1] == '2';

    HeaderReader in(bytes);
    in.advance(2);
    const auto cols = in.read_uint("width");
    if (cols == 0) throw DecodeError("PGM width must be positive", in.token_start());
    const auto rows = in.read_uint("height");
    if (rows == 0) throw DecodeError("PGM height must be positive", in.token_start());
    const auto maxval = in.read_uint("maxval");
    if (maxval == 0 || maxval > 65535) throw DecodeError("PGM maxval must be in 1..65535", in.token_start());

    // Every sample needs at least one byte, so the payload bounds the pixel count
    // before anything is allocated.
    const std::size_t count = rows * cols;
    if (count > bytes.size() - in.pos()) {
        throw DecodeError("truncated PGM raster, expected " + std::to_string(count) + " samples", bytes.size());
    }
    GrayImage img(rows, cols);

    if (ascii) {
        for (std::size_t i = 0; i < count; ++i) {
            const auto v = in.read_uint("sample");
            if (v > maxval) throw DecodeError("PGM sample exceeds maxval", in.token_start());
            img.data[i] = static_cast<double>(v);
        }
        return img;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    if (in.pos() >= bytes.size() || !std::isspace(bytes[in.pos()])) {
        throw DecodeError("missing whitespace before PGM raster", in.pos());
    }
    in.advance(1);
    const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
    const std::size_t raster = in.pos();
    if (bytes.size() - raster < count * sample_bytes) {
        throw DecodeError("truncated PGM raster, expected " + std::to_string(count * sample_bytes) +
                              " bytes",
                          bytes.size());
    }
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t off = raster + i * sample_bytes;
        const unsigned v = sample_bytes == 2 ? (unsigned{bytes[off]} << 8) | bytes[off + 1] : bytes[off];
        img.data[i] = static_cast<double>(v);
    }
    return img;
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img, unsigned maxval) {
    if (maxval == 0 || maxval > 65535) throw ArgumentError("PGM maxval must be in 1..65535");
    if (img.rows == 0 || img.cols == 0) throw ArgumentError("cannot encode an empty image");
    const std::string header = "P5\n" + std::to_string(img.cols) + " " + std::to_string(img.rows) +
                               "\n" + std::to_string(maxval) + "\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    const bool wide = maxval > 255;
    out.reserve(out.size() + img.data.size() * (wide ? 2 : 1));
    for (double v : img.data) {
        const auto s = static_cast<unsigned>(std::clamp(std::round(v), 0.0, static_cast<double>(maxval)));
        if (wide) out.push_back(static_cast<std::uint8_t>(s >> 8));
        out.push_back(static_cast<std::uint8_t>(s & 0xFF));
    }
    return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path.string());
    return bytes;
}

GrayImage read_pgm(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    try {
        return decode_pgm(bytes);
    } catch (const DecodeError& e) {
        throw DecodeError(path.string() + ": " + e.what(), e.offset());
    }
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img, unsigned maxval) {
    const auto bytes = encode_pgm(img, maxval);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

namespace {

struct Sample {
    std::size_t lo;
    std::size_t hi;
    double frac;
};

// Corner-aligned: destination index 0 maps to source 0 and the last index to the last.
std::vector<Sample> sample_positions(std::size_t src, std::size_t dst) {
    std::vector<Sample> out(dst);
    for (std::size_t i = 0; i < dst; ++i) {
        const double pos = dst == 1 ? (static_cast<double>(src) - 1.0) / 2.0
                                    : static_cast<double>(i * (src - 1)) / static_cast<double>(dst - 1);
        const auto lo = std::min(static_cast<std::size_t>(std::floor(pos)), src - 1);
        const auto hi = std::min(lo + 1, src - 1);
        out[i] = {lo, hi, pos - static_cast<double>(lo)};
    }
    return out;
}

}  // namespace

GrayImage resize_to(const GrayImage& img, std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw ArgumentError("resize target dimensions must be positive");
    if (img.rows == 0 || img.cols == 0) throw ArgumentError("cannot resize an empty image");
    if (rows == img.rows && cols == img.cols) return img;

    const auto ys = sample_positions(img.rows, rows);
    const auto xs = sample_positions(img.cols, cols);
    GrayImage out(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const auto& y = ys[r];
        for (std::size_t c = 0; c < cols; ++c) {
            const auto& x = xs[c];
            // v0 + f*(v1 - v0) keeps constant regions exactly constant.
            const double top = img.at(y.lo, x.lo) + x.frac * (img.at(y.lo, x.hi) - img.at(y.lo, x.lo));
            const double bot = img.at(y.hi, x.lo) + x.frac * (img.at(y.hi, x.hi) - img.at(y.hi, x.lo));
            out.at(r, c) = top + y.frac * (bot - top);
        }
    }
    return out;
}

GrayImage haar_dwt_ll(const GrayImage& img) {
    if (img.rows % 2 != 0 || img.cols % 2 != 0 || img.rows == 0 || img.cols == 0) {
        throw ArgumentError("Haar LL needs even, nonzero dimensions; got " + std::to_string(img.rows) + "x" +
                            std::to_string(img.cols));
    }
    GrayImage out(img.rows / 2, img.cols / 2);
    for (std::size_t r = 0; r < out.rows; ++r) {
        for (std::size_t c = 0; c < out.cols; ++c) {
            const double sum = img.at(2 * r, 2 * c) + img.at(2 * r, 2 * c + 1) + img.at(2 * r + 1, 2 * c) +
                               img.at(2 * r + 1, 2 * c + 1);
            out.at(r, c) = sum / 4.0;
        }
    }
    return out;
}

}  // namespace hogface
