#include "hogface/portal/photo.hpp"

#include <png.h>
// jpeglib.h expects stdio declarations first.
#include <csetjmp>
#include <cstdio>
#include <jpeglib.h>

#include <vector>

#include "hogface/errors.hpp"

namespace hogface::portal {

PhotoFormat sniff_format(std::span<const std::uint8_t> bytes) {
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '5')) return PhotoFormat::pgm;
    if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) return PhotoFormat::png;
    if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) return PhotoFormat::jpeg;
    throw DecodeError("unrecognized image format (expected PGM, PNG or JPEG)", 0);
}

std::string extension(PhotoFormat format) {
    switch (format) {
        case PhotoFormat::pgm: return "pgm";
        case PhotoFormat::png: return "png";
        case PhotoFormat::jpeg: return "jpg";
    }
    return "bin";
}

namespace {

GrayImage decode_png(std::span<const std::uint8_t> bytes) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        throw DecodeError(std::string("PNG: ") + image.message, 0);
    }
    image.format = PNG_FORMAT_GRAY;
    std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw DecodeError("PNG: " + msg, 0);
    }
    GrayImage out(image.height, image.width);
    for (std::size_t i = 0; i < pixels.size(); ++i) out.data[i] = pixels[i];
    return out;
}

struct JpegError {
    jpeg_error_mgr mgr;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_fail(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegError*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

// Kept free of non-trivial locals so longjmp cannot skip destructors.
bool jpeg_read_gray(std::span<const std::uint8_t> bytes, std::vector<std::uint8_t>& pixels, unsigned& rows,
                    unsigned& cols, JpegError& err) {
    jpeg_decompress_struct cinfo;
    cinfo.err = jpeg_std_error(&err.mgr);
    err.mgr.error_exit = jpeg_fail;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        return false;
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_GRAYSCALE;
    jpeg_start_decompress(&cinfo);
    rows = cinfo.output_height;
    cols = cinfo.output_width;
    pixels.resize(static_cast<std::size_t>(rows) * cols);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) * cols;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return true;
}

GrayImage decode_jpeg(std::span<const std::uint8_t> bytes) {
    std::vector<std::uint8_t> pixels;
    unsigned rows = 0;
    unsigned cols = 0;
    JpegError err{};
    if (!jpeg_read_gray(bytes, pixels, rows, cols, err)) throw DecodeError(std::string("JPEG: ") + err.message, 0);
    GrayImage out(rows, cols);
    for (std::size_t i = 0; i < pixels.size(); ++i) out.data[i] = pixels[i];
    return out;
}

}  // namespace

GrayImage decode_photo(std::span<const std::uint8_t> bytes) {
    GrayImage img;
    switch (sniff_format(bytes)) {
        case PhotoFormat::pgm: img = decode_pgm(bytes); break;
        case PhotoFormat::png: img = decode_png(bytes); break;
        case PhotoFormat::jpeg: img = decode_jpeg(bytes); break;
    }
    if (img.rows < 2 || img.cols < 2) throw DecodeError("image must be at least 2x2", 0);
    return img;
}

}  // namespace hogface::portal
