#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "hogface/imgio.hpp"

namespace hogface::portal {

enum class PhotoFormat { pgm, png, jpeg };

/// Sniffs the format from magic bytes. Throws DecodeError for anything else.
PhotoFormat sniff_format(std::span<const std::uint8_t> bytes);
std::string extension(PhotoFormat format);

/// Decodes PGM, PNG or JPEG to a single-channel intensity image (colour is
/// converted to luma). Throws DecodeError.
GrayImage decode_photo(std::span<const std::uint8_t> bytes);

}  // namespace hogface::portal
