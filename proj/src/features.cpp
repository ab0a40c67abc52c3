#include "infoquant/features.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

#include <nlohmann/json.hpp>

#include "infoquant/digest.hpp"

namespace iq {

namespace {

/// Welford accumulator. Single pass, and exactly zero on constant input:
/// once the running mean equals the sample, every delta is a true 0.0.
class RunningVariance {
public:
    void add(double x) {
        ++n_;
        double delta = x - mean_;
        mean_ += delta / n_;
        m2_ += delta * (x - mean_);
    }

    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double sum_sq_dev() const { return m2_; }
    double population_variance() const { return n_ ? m2_ / n_ : 0.0; }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

double apply_mode(double variance, StatisticMode mode) {
    return mode == StatisticMode::std_dev ? std::sqrt(variance) : variance;
}

struct ValueTables {
    std::array<double, 256> r, g, b;
    double denom;

    ValueTables() {
        for (int i = 0; i < 256; ++i) {
            r[i] = std::pow(i / 255.0, 2.2);
            g[i] = std::pow(1.5 * i / 255.0, 2.2);
            b[i] = std::pow(0.6 * i / 255.0, 2.2);
        }
        denom = 1.0 + std::pow(1.5, 2.2) + std::pow(0.6, 2.2);
    }
};

const ValueTables& value_tables() {
    static const ValueTables tables;
    return tables;
}

void append_double(std::string& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

}  // namespace

double variance_of_line(const EdgeMap& edges, const FeatureConfig& cfg) {
    RunningVariance acc;
    for (std::uint8_t f : edges.flags()) acc.add(static_cast<double>(f));
    return apply_mode(acc.population_variance(), cfg.statistic_mode);
}

std::optional<double> hue_value(const RgbPixel& px) {
    const int r = px.r, g = px.g, b = px.b;
    const int mx = std::max({r, g, b});
    const int mn = std::min({r, g, b});
    if (mx == mn) return std::nullopt;
    const double span = mx - mn;
    if (mx == r) {
        double h = 60.0 * (g - b) / span;
        return g >= b ? h : h + 360.0;
    }
    if (mx == g) return 60.0 * (b - r) / span + 120.0;
    return 60.0 * (r - g) / span + 240.0;
}

double variance_of_color(const RgbRaster& img, const FeatureConfig& cfg) {
    RunningVariance acc;
    for (const RgbPixel& px : img.pixels()) {
        if (auto h = hue_value(px)) acc.add(*h / cfg.hue_scale);
    }
    if (acc.count() == 0) return 0.0;
    return apply_mode(acc.population_variance(), cfg.statistic_mode);
}

double pixel_value(const RgbPixel& px) {
    const ValueTables& t = value_tables();
    return std::sqrt((t.r[px.r] + t.g[px.g] + t.b[px.b]) / t.denom);
}

double variance_of_value(const RgbRaster& img, const FeatureConfig& cfg) {
    RunningVariance acc;
    for (const RgbPixel& px : img.pixels()) acc.add(pixel_value(px));
    return apply_mode(acc.population_variance(), cfg.statistic_mode);
}

double variance_of_space(const EdgeMap& edges, const FeatureConfig& cfg) {
    const int w = edges.width();
    const int h = edges.height();
    RunningVariance xs, ys;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (edges.at(x, y)) {
                // 1-based coordinates normalized into (0, 1].
                xs.add(static_cast<double>(x + 1) / w);
                ys.add(static_cast<double>(y + 1) / h);
            }
        }
    }
    if (xs.count() < 2) return 0.0;
    if (cfg.space_normalize_by_count) {
        return xs.population_variance() / 2.0 + ys.population_variance() / 2.0;
    }
    return xs.sum_sq_dev() / (2.0 * w) + ys.sum_sq_dev() / (2.0 * h);
}

double lateral_ssim(const GrayRaster& gray, const SsimParams& p) {
    const int w = gray.width();
    const int h = gray.height();
    if (w < 2) throw GeometryError("lateral SSIM needs an image at least 2 pixels wide");
    const int half = w / 2;

    // Left half pairs with the mirrored right half so that a laterally
    // symmetric image aligns pixel-to-pixel. The formula below is kept
    // symmetric in L and R term by term.
    double sum_l = 0.0, sum_r = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int i = 0; i < half; ++i) {
            sum_l += gray.at(i, y);
            sum_r += gray.at(w - 1 - i, y);
        }
    }
    const double n = static_cast<double>(half) * h;
    const double mu_l = sum_l / n;
    const double mu_r = sum_r / n;

    double var_l = 0.0, var_r = 0.0, cov = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int i = 0; i < half; ++i) {
            double dl = gray.at(i, y) - mu_l;
            double dr = gray.at(w - 1 - i, y) - mu_r;
            var_l += dl * dl;
            var_r += dr * dr;
            cov += dl * dr;
        }
    }
    var_l /= n;
    var_r /= n;
    cov /= n;

    const double num = (2.0 * (mu_l * mu_r) + p.c1()) * (2.0 * cov + p.c2());
    const double den =
        ((mu_l * mu_l + mu_r * mu_r) + p.c1()) * ((var_l + var_r) + p.c2());
    return num / den;
}

double variance_of_shape(const GrayRaster& gray, const FeatureConfig& cfg,
                         const SsimParams& p) {
    const double ssim = lateral_ssim(gray, p);
    return std::min(1.0, 1.0 / (1000.0 * std::max(ssim, cfg.ssim_floor)));
}

FeatureVector extract_features(const RgbRaster& img, const FeatureConfig& cfg,
                               const SsimParams& p) {
    const RgbRaster analyzed = resize_to_budget(img, cfg.resize_max_dim);
    const GrayRaster gray = to_grayscale(analyzed);
    const EdgeMap edges = detect_edges(gray, cfg.edge_threshold);

    FeatureVector fv;
    fv.v_line = variance_of_line(edges, cfg);
    fv.v_color = variance_of_color(analyzed, cfg);
    fv.v_value = variance_of_value(analyzed, cfg);
    fv.v_shape = variance_of_shape(gray, cfg, p);
    fv.v_space = variance_of_space(edges, cfg);
    fv.meta.source_id = img.source_id();
    fv.meta.width = analyzed.width();
    fv.meta.height = analyzed.height();
    fv.meta.config_fingerprint = fingerprint(cfg);
    return fv;
}

std::string feature_csv_header() {
    return "source_id,v_line,v_color,v_value,v_shape,v_space,width,height,config_fingerprint";
}

std::string feature_csv_row(const FeatureVector& fv) {
    std::string row = fv.meta.source_id;
    row += ',';
    append_double(row, fv.v_line);
    row += ',';
    append_double(row, fv.v_color);
    row += ',';
    append_double(row, fv.v_value);
    row += ',';
    append_double(row, fv.v_shape);
    row += ',';
    append_double(row, fv.v_space);
    row += ',';
    row += std::to_string(fv.meta.width);
    row += ',';
    row += std::to_string(fv.meta.height);
    row += ',';
    row += hex64(fv.meta.config_fingerprint);
    return row;
}

std::string feature_json(const FeatureVector& fv) {
    nlohmann::json j{{"source_id", fv.meta.source_id},
                     {"v_line", fv.v_line},
                     {"v_color", fv.v_color},
                     {"v_value", fv.v_value},
                     {"v_shape", fv.v_shape},
                     {"v_space", fv.v_space},
                     {"width", fv.meta.width},
                     {"height", fv.meta.height},
                     {"config_fingerprint", hex64(fv.meta.config_fingerprint)}};
    return j.dump();
}

FeatureVector feature_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    FeatureVector fv;
    fv.v_line = j.at("v_line").get<double>();
    fv.v_color = j.at("v_color").get<double>();
    fv.v_value = j.at("v_value").get<double>();
    fv.v_shape = j.at("v_shape").get<double>();
    fv.v_space = j.at("v_space").get<double>();
    fv.meta.source_id = j.at("source_id").get<std::string>();
    fv.meta.width = j.at("width").get<int>();
    fv.meta.height = j.at("height").get<int>();
    fv.meta.config_fingerprint = parse_hex64(j.at("config_fingerprint").get<std::string>());
    return fv;
}

}  // namespace iq
