#include <csetjmp>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include <jpeglib.h>
#include <png.h>

#include "infoquant/raster.hpp"

namespace iq {

namespace {

constexpr std::uint64_t kMaxPixels = 1ull << 28;  // 268 Mpx decode guard

bool looks_like_png(std::span<const std::uint8_t> bytes) {
    static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    return bytes.size() >= 8 && std::memcmp(bytes.data(), sig, 8) == 0;
}

bool looks_like_jpeg(std::span<const std::uint8_t> bytes) {
    return bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF;
}

std::uint8_t over_white(unsigned c, unsigned a) {
    // Integer alpha compositing against a white background, rounded.
    return static_cast<std::uint8_t>((c * a + 255u * (255u - a) + 127u) / 255u);
}

struct PngMemReader {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t pos;
};

void png_mem_read(png_structp png, png_bytep out, png_size_t len) {
    auto* rd = static_cast<PngMemReader*>(png_get_io_ptr(png));
    if (rd->pos + len > rd->size) {
        png_error(png, "unexpected end of PNG stream");
    }
    std::memcpy(out, rd->data + rd->pos, len);
    rd->pos += len;
}

void png_mem_write(png_structp png, png_bytep data, png_size_t len) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + len);
}

void png_mem_flush(png_structp) {}

RgbRaster decode_png(std::span<const std::uint8_t> bytes, std::string source_id) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw DecodeError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw DecodeError("libpng init failed");
    }

    std::vector<png_byte> interleaved;
    PngMemReader reader{bytes.data(), bytes.size(), 0};

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DecodeError("malformed PNG payload");
    }

    png_set_read_fn(png, &reader, png_mem_read);
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    if (w == 0 || h == 0 || static_cast<std::uint64_t>(w) * h > kMaxPixels) {
        png_destroy_read_struct(&png, &info, nullptr);
        if (w == 0 || h == 0) throw DimensionError("PNG has zero area");
        throw DecodeError("PNG exceeds pixel budget");
    }

    // Normalize every color type to 8-bit RGBA, then composite below.
    png_set_expand(png);
    if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
    png_byte color = png_get_color_type(png, info);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
        png_set_gray_to_rgb(png);
    }
    png_set_filler(png, 0xFF, PNG_FILLER_AFTER);
    png_read_update_info(png, info);

    interleaved.resize(static_cast<std::size_t>(w) * h * 4);
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y) {
        rows[y] = interleaved.data() + static_cast<std::size_t>(y) * w * 4;
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    std::vector<RgbPixel> pixels(static_cast<std::size_t>(w) * h);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        const png_byte* p = interleaved.data() + i * 4;
        pixels[i] = {over_white(p[0], p[3]), over_white(p[1], p[3]), over_white(p[2], p[3])};
    }
    return RgbRaster(static_cast<int>(w), static_cast<int>(h), std::move(pixels),
                     std::move(source_id));
}

struct JpegErrorMgr {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    std::longjmp(err->jump, 1);
}

RgbRaster decode_jpeg(std::span<const std::uint8_t> bytes, std::string source_id) {
    jpeg_decompress_struct cinfo;
    JpegErrorMgr jerr;
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit;

    std::vector<RgbPixel> pixels;
    if (setjmp(jerr.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw DecodeError("malformed JPEG payload");
    }

    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    if (jpeg_read_header(&cinfo, TRUE) != JPEG_HEADER_OK) {
        jpeg_destroy_decompress(&cinfo);
        throw DecodeError("malformed JPEG header");
    }
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);

    const JDIMENSION w = cinfo.output_width;
    const JDIMENSION h = cinfo.output_height;
    if (w == 0 || h == 0 || static_cast<std::uint64_t>(w) * h > kMaxPixels) {
        jpeg_destroy_decompress(&cinfo);
        if (w == 0 || h == 0) throw DimensionError("JPEG has zero area");
        throw DecodeError("JPEG exceeds pixel budget");
    }

    pixels.resize(static_cast<std::size_t>(w) * h);
    std::vector<JSAMPLE> row(static_cast<std::size_t>(w) * cinfo.output_components);
    JSAMPROW rowp = row.data();
    while (cinfo.output_scanline < h) {
        JDIMENSION y = cinfo.output_scanline;
        jpeg_read_scanlines(&cinfo, &rowp, 1);
        for (JDIMENSION x = 0; x < w; ++x) {
            pixels[static_cast<std::size_t>(y) * w + x] = {row[x * 3 + 0], row[x * 3 + 1],
                                                           row[x * 3 + 2]};
        }
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);

    return RgbRaster(static_cast<int>(w), static_cast<int>(h), std::move(pixels),
                     std::move(source_id));
}

}  // namespace

RgbRaster decode_image(std::span<const std::uint8_t> bytes, std::string source_id) {
    if (looks_like_png(bytes)) return decode_png(bytes, std::move(source_id));
    if (looks_like_jpeg(bytes)) return decode_jpeg(bytes, std::move(source_id));
    throw DecodeError("unsupported image format (expected PNG or JPEG)");
}

std::vector<std::uint8_t> encode_png(const RgbRaster& img) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw DecodeError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw DecodeError("libpng init failed");
    }

    std::vector<std::uint8_t> out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw DecodeError("PNG encode failed");
    }

    png_set_write_fn(png, &out, png_mem_write, png_mem_flush);
    png_set_IHDR(png, info, img.width(), img.height(), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_byte> row(static_cast<std::size_t>(img.width()) * 3);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const RgbPixel& p = img.at(x, y);
            row[x * 3 + 0] = p.r;
            row[x * 3 + 1] = p.g;
            row[x * 3 + 2] = p.b;
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

std::vector<std::uint8_t> encode_jpeg(const RgbRaster& img, int quality) {
    jpeg_compress_struct cinfo;
    JpegErrorMgr jerr;
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit;

    unsigned char* buf = nullptr;
    unsigned long buf_size = 0;
    if (setjmp(jerr.jump)) {
        jpeg_destroy_compress(&cinfo);
        if (buf) free(buf);
        throw DecodeError("JPEG encode failed");
    }

    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, &buf, &buf_size);
    cinfo.image_width = static_cast<JDIMENSION>(img.width());
    cinfo.image_height = static_cast<JDIMENSION>(img.height());
    cinfo.input_components = 3;
    cinfo.in_color_space = JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    jpeg_start_compress(&cinfo, TRUE);

    std::vector<JSAMPLE> row(static_cast<std::size_t>(img.width()) * 3);
    JSAMPROW rowp = row.data();
    while (cinfo.next_scanline < cinfo.image_height) {
        int y = static_cast<int>(cinfo.next_scanline);
        for (int x = 0; x < img.width(); ++x) {
            const RgbPixel& p = img.at(x, y);
            row[x * 3 + 0] = p.r;
            row[x * 3 + 1] = p.g;
            row[x * 3 + 2] = p.b;
        }
        jpeg_write_scanlines(&cinfo, &rowp, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);

    std::vector<std::uint8_t> out(buf, buf + buf_size);
    free(buf);
    return out;
}

}  // namespace iq
