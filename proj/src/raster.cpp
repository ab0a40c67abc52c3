#include "infoquant/raster.hpp"

#include <algorithm>
#include <cmath>

namespace iq {

namespace {

void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
        throw DimensionError("raster dimensions must be at least 1x1, got " +
                             std::to_string(width) + "x" + std::to_string(height));
    }
}

}  // namespace

RgbRaster::RgbRaster(int width, int height, std::string source_id)
    : width_(width), height_(height), source_id_(std::move(source_id)) {
    check_dims(width, height);
    pixels_.resize(static_cast<std::size_t>(width) * height);
}

RgbRaster::RgbRaster(int width, int height, std::vector<RgbPixel> pixels,
                     std::string source_id)
    : width_(width),
      height_(height),
      pixels_(std::move(pixels)),
      source_id_(std::move(source_id)) {
    check_dims(width, height);
    if (pixels_.size() != static_cast<std::size_t>(width) * height) {
        throw DimensionError("pixel count does not match raster dimensions");
    }
}

GrayRaster::GrayRaster(int width, int height) : width_(width), height_(height) {
    check_dims(width, height);
    values_.resize(static_cast<std::size_t>(width) * height, 0.0);
}

EdgeMap::EdgeMap(int width, int height) : width_(width), height_(height) {
    check_dims(width, height);
    flags_.resize(static_cast<std::size_t>(width) * height, 0);
}

RgbRaster resize_to_budget(const RgbRaster& img, int max_dim) {
    if (max_dim < 1) throw DimensionError("max_dim must be >= 1");
    const int sw = img.width();
    const int sh = img.height();
    if (std::max(sw, sh) <= max_dim) return img;

    int dw, dh;
    if (sw >= sh) {
        dw = max_dim;
        dh = std::max(1, static_cast<int>(std::lround(
                             static_cast<double>(sh) * max_dim / sw)));
    } else {
        dh = max_dim;
        dw = std::max(1, static_cast<int>(std::lround(
                             static_cast<double>(sw) * max_dim / sh)));
    }

    std::vector<RgbPixel> out(static_cast<std::size_t>(dw) * dh);
    const double sx = static_cast<double>(sw) / dw;
    const double sy = static_cast<double>(sh) / dh;
    for (int y = 0; y < dh; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        int y0 = static_cast<int>(std::floor(fy));
        double ty = fy - y0;
        int y1 = std::min(y0 + 1, sh - 1);
        y0 = std::clamp(y0, 0, sh - 1);
        for (int x = 0; x < dw; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            int x0 = static_cast<int>(std::floor(fx));
            double tx = fx - x0;
            int x1 = std::min(x0 + 1, sw - 1);
            x0 = std::clamp(x0, 0, sw - 1);

            const RgbPixel& p00 = img.at(x0, y0);
            const RgbPixel& p10 = img.at(x1, y0);
            const RgbPixel& p01 = img.at(x0, y1);
            const RgbPixel& p11 = img.at(x1, y1);

            auto lerp2 = [&](std::uint8_t RgbPixel::* ch) {
                double top = (p00.*ch) * (1.0 - tx) + (p10.*ch) * tx;
                double bot = (p01.*ch) * (1.0 - tx) + (p11.*ch) * tx;
                double v = top * (1.0 - ty) + bot * ty;
                return static_cast<std::uint8_t>(
                    std::clamp<long>(std::lround(v), 0, 255));
            };
            out[static_cast<std::size_t>(y) * dw + x] = {
                lerp2(&RgbPixel::r), lerp2(&RgbPixel::g), lerp2(&RgbPixel::b)};
        }
    }
    return RgbRaster(dw, dh, std::move(out), img.source_id());
}

GrayRaster to_grayscale(const RgbRaster& img) {
    GrayRaster gray(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const RgbPixel& p = img.at(x, y);
            gray.set(x, y, 0.3 * p.r + 0.59 * p.g + 0.11 * p.b);
        }
    }
    return gray;
}

EdgeMap detect_edges(const GrayRaster& gray, double threshold) {
    if (!(threshold > 0.0)) throw DomainError("edge threshold must be > 0");
    const int w = gray.width();
    const int h = gray.height();
    EdgeMap edges(w, h);

    auto sample = [&](int x, int y) {
        return gray.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
    };

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double a = sample(x - 1, y - 1), b = sample(x, y - 1), c = sample(x + 1, y - 1);
            double d = sample(x - 1, y), f = sample(x + 1, y);
            double g = sample(x - 1, y + 1), hh = sample(x, y + 1), i = sample(x + 1, y + 1);
            double gx = (c + 2.0 * f + i) - (a + 2.0 * d + g);
            double gy = (g + 2.0 * hh + i) - (a + 2.0 * b + c);
            double mag = std::sqrt(gx * gx + gy * gy);
            edges.set(x, y, mag >= threshold);
        }
    }
    return edges;
}

}  // namespace iq
