#ifndef INFOQUANT_FEATURES_HPP
#define INFOQUANT_FEATURES_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "infoquant/raster.hpp"

namespace iq {

enum class StatisticMode { variance, std_dev };

/// Stability constants of the structural-similarity index.
struct SsimParams {
    double k1 = 0.01;
    double k2 = 0.03;
    double luminance_range = 256.0;

    double c1() const { return (k1 * luminance_range) * (k1 * luminance_range); }
    double c2() const { return (k2 * luminance_range) * (k2 * luminance_range); }
};

/// Every knob of the measurement pipeline. The fingerprint of this struct
/// travels with each FeatureVector so that vectors from different pipelines
/// are never compared.
struct FeatureConfig {
    double edge_threshold = 80.0;       // 0-255 gradient scale
    int resize_max_dim = 1024;          // downscale-only budget
    StatisticMode statistic_mode = StatisticMode::variance;
    double ssim_floor = 0.001;
    double hue_scale = 360.0;           // degrees-to-unit divisor
    bool space_normalize_by_count = false;  // alternative to the 2X/2Y denominators
};

/// Stable 64-bit hash of the canonicalized config JSON.
std::uint64_t fingerprint(const FeatureConfig& cfg);

struct FeatureMeta {
    std::string source_id;
    int width = 0;   // analyzed (post-resize) dimensions
    int height = 0;
    std::uint64_t config_fingerprint = 0;
};

/// The five information-quantity measures of one painting.
struct FeatureVector {
    double v_line = 0.0;
    double v_color = 0.0;
    double v_value = 0.0;
    double v_shape = 0.0;
    double v_space = 0.0;
    FeatureMeta meta;
};

/// Population variance of the binary edge flags; square root in
/// std_dev mode.
double variance_of_line(const EdgeMap& edges, const FeatureConfig& cfg = {});

/// Angular hue in [0, 360) degrees, or nullopt for achromatic pixels
/// (max channel == min channel).
std::optional<double> hue_value(const RgbPixel& px);

/// Variance of defined hues rescaled by 1/hue_scale; achromatic pixels
/// are excluded. Returns 0 when no pixel has a defined hue.
double variance_of_color(const RgbRaster& img, const FeatureConfig& cfg = {});

/// Perceptual lightness in [0, 1]:
/// sqrt(((R/255)^2.2 + (1.5 G/255)^2.2 + (0.6 B/255)^2.2) / (1 + 1.5^2.2 + 0.6^2.2)).
double pixel_value(const RgbPixel& px);

/// Population variance of pixel_value over all pixels.
double variance_of_value(const RgbRaster& img, const FeatureConfig& cfg = {});

/// Dispersion of edge-pixel positions: with 1-based coordinates normalized
/// by the image dimensions, sum of squared x-deviations over 2X plus sum of
/// squared y-deviations over 2Y. Returns 0 with fewer than two edge pixels.
double variance_of_space(const EdgeMap& edges, const FeatureConfig& cfg = {});

/// Global structural similarity between the left half and the horizontally
/// mirrored right half (middle column dropped when the width is odd).
/// Throws GeometryError when width < 2.
double lateral_ssim(const GrayRaster& gray, const SsimParams& p = {});

/// Scaled inverse of the lateral SSIM, floored and clamped into (0, 1]:
/// min(1, 1 / (1000 * max(ssim, ssim_floor))).
double variance_of_shape(const GrayRaster& gray, const FeatureConfig& cfg = {},
                         const SsimParams& p = {});

/// Full pipeline: resize to budget, grayscale, edge detection, then all
/// five measures. Deterministic for identical raster + config.
FeatureVector extract_features(const RgbRaster& img, const FeatureConfig& cfg = {},
                               const SsimParams& p = {});

std::string feature_csv_header();
std::string feature_csv_row(const FeatureVector& fv);
std::string feature_json(const FeatureVector& fv);
FeatureVector feature_from_json(const std::string& text);

}  // namespace iq

#endif  // INFOQUANT_FEATURES_HPP
