#ifndef INFOQUANT_RASTER_HPP
#define INFOQUANT_RASTER_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "infoquant/errors.hpp"

namespace iq {

struct RgbPixel {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    bool operator==(const RgbPixel&) const = default;
};

/// Decoded image: a width x height grid of 8-bit RGB pixels, row major.
/// Rasters are treated as immutable once built and are safe to share
/// across threads.
class RgbRaster {
public:
    RgbRaster(int width, int height, std::string source_id = {});
    RgbRaster(int width, int height, std::vector<RgbPixel> pixels,
              std::string source_id = {});

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return pixels_.size(); }

    const RgbPixel& at(int x, int y) const { return pixels_[idx(x, y)]; }
    RgbPixel& at(int x, int y) { return pixels_[idx(x, y)]; }

    std::span<const RgbPixel> pixels() const { return pixels_; }

    const std::string& source_id() const { return source_id_; }
    void set_source_id(std::string id) { source_id_ = std::move(id); }

private:
    std::size_t idx(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_;
    int height_;
    std::vector<RgbPixel> pixels_;
    std::string source_id_;
};

/// Real-valued grayscale grid in [0, 255]. Kept floating point so the
/// gradient operator sees the exact luma values, never a quantized copy.
class GrayRaster {
public:
    GrayRaster(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }

    double at(int x, int y) const { return values_[idx(x, y)]; }
    void set(int x, int y, double v) { values_[idx(x, y)] = v; }

    std::span<const double> values() const { return values_; }

private:
    std::size_t idx(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_;
    int height_;
    std::vector<double> values_;
};

/// Binary edge grid: 1 marks a strong grayscale gradient.
class EdgeMap {
public:
    EdgeMap(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return flags_.size(); }

    std::uint8_t at(int x, int y) const { return flags_[idx(x, y)]; }
    void set(int x, int y, bool on) { flags_[idx(x, y)] = on ? 1 : 0; }

    std::span<const std::uint8_t> flags() const { return flags_; }

private:
    std::size_t idx(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> flags_;
};

/// Decodes a PNG or JPEG payload. An alpha channel, if present, is
/// composited over white and dropped.
///
/// Throws DecodeError on malformed/unsupported bytes and DimensionError
/// on a zero-area image.
RgbRaster decode_image(std::span<const std::uint8_t> bytes,
                       std::string source_id = {});

std::vector<std::uint8_t> encode_png(const RgbRaster& img);
std::vector<std::uint8_t> encode_jpeg(const RgbRaster& img, int quality = 90);

/// Downscale-only resolution alignment. Returns the input unchanged when
/// max(width, height) <= max_dim; otherwise resamples bilinearly so the
/// longer side equals max_dim, preserving aspect ratio (rounded, min 1).
RgbRaster resize_to_budget(const RgbRaster& img, int max_dim);

/// Floating-point luma: grayscale = 0.3 R + 0.59 G + 0.11 B.
GrayRaster to_grayscale(const RgbRaster& img);

/// 3x3 Sobel with edge-replication padding; a pixel is an edge iff
/// sqrt(gx^2 + gy^2) >= threshold on the 0-255 grayscale scale.
EdgeMap detect_edges(const GrayRaster& gray, double threshold);

}  // namespace iq

#endif  // INFOQUANT_RASTER_HPP
