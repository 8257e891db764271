#include "hogface/portal/records.hpp"

#include <fcntl.h>
#include <openssl/evp.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <iostream>

#include "hogface/binary_io.hpp"
#include "hogface/errors.hpp"
#include "hogface/imgio.hpp"

namespace fs = std::filesystem;

namespace hogface::portal {

namespace {

constexpr std::uint8_t kMagic[4] = {'2', 'D', 'H', 'R'};
constexpr std::uint32_t kLogVersion = 1;

std::vector<std::uint8_t> header_bytes(const std::string& model_tag) {
    ByteWriter w;
    w.raw(kMagic);
    w.u32(kLogVersion);
    w.str(model_tag);
    return std::move(w.bytes());
}

std::vector<std::uint8_t> encode_person(const StoredPerson& p) {
    ByteWriter w;
    w.str(p.record.id);
    w.str(p.record.name);
    w.u8(p.record.status == Status::found ? 1 : 0);
    w.str(p.record.contact);
    w.i64(p.record.enrolled_at);
    w.u32(static_cast<std::uint32_t>(p.record.photo_refs.size()));
    for (const auto& r : p.record.photo_refs) w.str(r);
    w.u32(static_cast<std::uint32_t>(p.features.size()));
    for (const auto& f : p.features) w.matrix(f);
    return std::move(w.bytes());
}

StoredPerson decode_person(std::span<const std::uint8_t> payload) {
    ByteReader r(payload);
    StoredPerson p;
    p.record.id = r.str();
    p.record.name = r.str();
    const auto status = r.u8();
    if (status > 1) throw ArgumentError("bad status byte");
    p.record.status = status == 1 ? Status::found : Status::missing;
    p.record.contact = r.str();
    p.record.enrolled_at = r.i64();
    const auto refs = r.u32();
    if (refs > r.remaining() / 4) throw ArgumentError("bad photo ref count");
    for (std::uint32_t i = 0; i < refs; ++i) p.record.photo_refs.push_back(r.str());
    const auto feats = r.u32();
    if (feats > r.remaining() / 8) throw ArgumentError("bad feature count");
    for (std::uint32_t i = 0; i < feats; ++i) p.features.push_back(r.matrix());
    if (r.remaining() != 0) throw ArgumentError("trailing bytes in record");
    return p;
}

void fsync_path(const fs::path& p) {
    const int fd = ::open(p.c_str(), O_RDONLY | O_CLOEXEC);
    if (fd >= 0) {
        ::fsync(fd);
        ::close(fd);
    }
}

}  // namespace

std::optional<Status> parse_status(std::string_view text) {
    if (text == "missing") return Status::missing;
    if (text == "found") return Status::found;
    return std::nullopt;
}

std::string_view status_name(Status status) { return status == Status::found ? "found" : "missing"; }

RecordLog::RecordLog(fs::path path, std::string model_tag) : path_(std::move(path)), model_tag_(std::move(model_tag)) {
    std::error_code ec;
    if (!fs::exists(path_, ec)) {
        try {
            write_file_atomic(path_, header_bytes(model_tag_));
        } catch (const IoError& e) {
            throw StorageError(e.what());
        }
        fsync_path(path_.parent_path());
        return;
    }

    std::vector<std::uint8_t> bytes;
    try {
        bytes = read_file_bytes(path_);
    } catch (const IoError& e) {
        throw StorageError(e.what());
    }
    ByteReader r(bytes);
    std::string stored_tag;
    try {
        for (auto m : kMagic)
            if (r.u8() != m) throw StorageError(path_.string() + " is not a record log");
        if (r.u32() != kLogVersion) throw StorageError(path_.string() + ": unsupported record log version");
        stored_tag = r.str(256);
    } catch (const TruncatedInput&) {
        throw StorageError(path_.string() + ": record log header is truncated");
    }
    if (stored_tag != model_tag_) {
        throw StorageError(path_.string() + " was written for model " + stored_tag + ", loaded model is " +
                           model_tag_);
    }

    std::size_t good_end = r.pos();
    while (r.remaining() > 0) {
        try {
            const std::size_t len = r.u32();
            if (len + 8 > r.remaining()) break;
            const auto payload = std::span<const std::uint8_t>(bytes).subspan(r.pos(), len);
            r.skip(len);
            if (r.u64() != byte_sum(payload)) break;
            recovered_.push_back(decode_person(payload));
            good_end = r.pos();
        } catch (const std::exception&) {
            break;
        }
    }
    if (good_end < bytes.size()) {
        dropped_bytes_ = bytes.size() - good_end;
        std::cerr << "record log: dropping " << dropped_bytes_ << " bytes of torn tail from " << path_ << "\n";
        fs::resize_file(path_, good_end, ec);
        if (ec) throw StorageError("cannot truncate " + path_.string() + ": " + ec.message());
    }
}

void RecordLog::append(const StoredPerson& person) {
    const auto payload = encode_person(person);
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(payload.size()));
    w.raw(payload);
    w.u64(byte_sum(payload));
    const auto& bytes = w.bytes();

    const int fd = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CLOEXEC);
    if (fd < 0) throw StorageError("cannot open " + path_.string() + ": " + std::strerror(errno));
    const off_t before = ::lseek(fd, 0, SEEK_END);
    std::size_t done = 0;
    bool ok = before >= 0;
    while (ok && done < bytes.size()) {
        const auto n = ::write(fd, bytes.data() + done, bytes.size() - done);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) {
            ok = false;
            break;
        }
        done += static_cast<std::size_t>(n);
    }
    ok = ok && ::fsync(fd) == 0;
    if (!ok) {
        const int err = errno;
        if (before >= 0 && ::ftruncate(fd, before) == 0) ::fsync(fd);
        ::close(fd);
        throw StorageError("append to " + path_.string() + " failed: " + std::strerror(err));
    }
    ::close(fd);
}

BlobStore::BlobStore(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw StorageError("cannot create " + dir_.string() + ": " + ec.message());
}

std::string BlobStore::put(std::span<const std::uint8_t> bytes, std::string_view ext) {
    std::string ref = sha256_hex(bytes) + "." + std::string(ext);
    const auto target = dir_ / ref;
    std::error_code ec;
    if (fs::exists(target, ec)) return ref;
    try {
        write_file_atomic(target, bytes);
    } catch (const IoError& e) {
        throw StorageError(e.what());
    }
    fsync_path(dir_);
    return ref;
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr)) {
        throw StorageError("SHA-256 failed");
    }
    std::string hex;
    hex.reserve(2 * len);
    char buf[3];
    for (unsigned i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

}  // namespace hogface::portal
