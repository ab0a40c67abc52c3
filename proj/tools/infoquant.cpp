// Command-line front end: extract features, fit hedonic regressions,
// project price ratios, summarize feature files, and generate synthetic
// datasets. Human-readable tables go to stdout; machine artifacts go to
// files under --out, each output directory carrying a manifest.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "infoquant/catalog.hpp"
#include "infoquant/config.hpp"
#include "infoquant/digest.hpp"
#include "infoquant/hedonic.hpp"
#include "infoquant/manifest.hpp"
#include "infoquant/synth.hpp"
#include "infoquant/version.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUnusable = 1;
constexpr int kExitPartial = 2;

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw iq::Error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string format10(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

int cmd_extract(const fs::path& catalog_path, const fs::path& image_root,
                const std::optional<fs::path>& config_path, const fs::path& out_dir,
                int threads, bool fail_fast) {
    iq::ToolConfig config;
    if (config_path) config = iq::load_config(*config_path);
    const auto fingerprint_hex = iq::hex64(iq::fingerprint(config.features));

    if (!fs::is_directory(image_root)) {
        throw iq::Error("image root " + image_root.string() + " is not a directory");
    }
    const auto records = iq::load_catalog(catalog_path);
    const fs::path cache_path = iq::cache_path_for(catalog_path);
    iq::FeatureCache cache = iq::FeatureCache::load(cache_path);

    iq::ExtractOptions options;
    options.threads = threads;
    options.fail_fast = fail_fast;
    iq::ExtractStats stats;
    const auto outcomes =
        iq::extract_all(records, image_root, config.features, cache, options, &stats);
    cache.save(cache_path);

    fs::create_directories(out_dir);
    std::string csv = iq::feature_csv_header();
    csv += '\n';
    std::string errors;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (outcomes[i].features) {
            iq::FeatureVector fv = *outcomes[i].features;
            fv.meta.source_id = records[i].id;  // rows align with the catalog by id
            csv += iq::feature_csv_row(fv);
            csv += '\n';
        } else {
            errors += outcomes[i].error;
            errors += '\n';
        }
    }
    iq::write_file_text(out_dir / "features.csv", csv);

    std::vector<fs::path> inputs{catalog_path};
    if (config_path) inputs.push_back(*config_path);
    iq::write_manifest(out_dir, iq::make_manifest("extract", fingerprint_hex, inputs));

    std::fprintf(stderr, "extracted %zu records (%d computed, %d cache hits)\n",
                 records.size(), stats.computed, stats.cache_hits);
    if (!errors.empty()) {
        iq::write_file_text(out_dir / "errors.txt", errors);
        std::fputs(errors.c_str(), stderr);
        return kExitPartial;
    }
    return kExitOk;
}

int cmd_fit(const fs::path& catalog_path, const fs::path& features_path,
            const std::optional<fs::path>& spec_path, const fs::path& out_dir) {
    iq::ToolConfig config;
    if (spec_path) config = iq::load_config(*spec_path);

    const auto records = iq::load_catalog(catalog_path);
    const auto feature_rows = iq::load_feature_csv(features_path);

    std::map<std::string, const iq::FeatureVector*> by_id;
    for (const auto& fv : feature_rows) by_id[fv.meta.source_id] = &fv;
    std::vector<iq::FeatureVector> aligned;
    aligned.reserve(records.size());
    for (const auto& r : records) {
        auto it = by_id.find(r.id);
        if (it == by_id.end()) {
            throw iq::AlignmentError("no feature row for record " + r.id);
        }
        aligned.push_back(*it->second);
    }

    const iq::DesignMatrix dm = iq::build_design_matrix(records, aligned, config.model);
    const iq::ModelFit fit = iq::ols_fit(dm);
    const std::string table = iq::render_table(fit);

    fs::create_directories(out_dir);
    iq::write_file_text(out_dir / "model.json", iq::fit_json(fit) + "\n");
    iq::write_file_text(out_dir / "table.txt", table);

    std::vector<fs::path> inputs{catalog_path, features_path};
    if (spec_path) inputs.push_back(*spec_path);
    iq::write_manifest(out_dir,
                       iq::make_manifest("fit", iq::hex64(fit.spec_fingerprint), inputs));

    std::fputs(table.c_str(), stdout);
    return kExitOk;
}

iq::FeatureVector select_feature_row(const fs::path& path, const std::string& id,
                                     const char* which) {
    const auto rows = iq::load_feature_csv(path);
    if (rows.empty()) throw iq::Error(std::string(which) + ": no feature rows in " + path.string());
    if (id.empty()) {
        if (rows.size() > 1) {
            throw iq::Error(std::string(which) + ": " + path.string() +
                            " has several rows; pass --" + which + "-id");
        }
        return rows.front();
    }
    for (const auto& fv : rows) {
        if (fv.meta.source_id == id) return fv;
    }
    throw iq::Error(std::string(which) + ": no row with source_id '" + id + "' in " +
                    path.string());
}

int cmd_predict(const fs::path& model_path, const fs::path& a_path, const std::string& a_id,
                const fs::path& b_path, const std::string& b_id) {
    const iq::ModelFit fit = iq::fit_from_json(read_text_file(model_path));
    const iq::FeatureVector a = select_feature_row(a_path, a_id, "a");
    const iq::FeatureVector b = select_feature_row(b_path, b_id, "b");

    if (a.meta.config_fingerprint != fit.feature_fingerprint ||
        b.meta.config_fingerprint != fit.feature_fingerprint) {
        throw iq::ConfigMismatchError(
            "feature rows were not produced under the model's extraction config");
    }

    const iq::RatioReport report = iq::price_ratio_report(fit, a, b);
    std::printf("%-14s %14s %14s %14s %14s\n", "term", "a", "b", "delta",
                "contribution");
    for (const auto& term : report.terms) {
        std::printf("%-14s %14.6g %14.6g %14.6g %14.6g\n", term.column.c_str(),
                    term.transformed_a, term.transformed_b, term.delta,
                    term.contribution);
    }
    std::printf("log ratio: %.6g\n", report.log_ratio);
    std::printf("price ratio (a/b): %.6g\n", report.ratio);
    return kExitOk;
}

int cmd_summary(const fs::path& features_path) {
    const auto rows = iq::load_feature_csv(features_path);
    if (rows.empty()) throw iq::Error("no feature rows in " + features_path.string());

    const char* names[5] = {"v_line", "v_color", "v_value", "v_shape", "v_space"};
    auto component = [](const iq::FeatureVector& fv, int m) {
        switch (m) {
            case 0: return fv.v_line;
            case 1: return fv.v_color;
            case 2: return fv.v_value;
            case 3: return fv.v_shape;
            default: return fv.v_space;
        }
    };

    const std::size_t n = rows.size();
    double mean[5], sd[5], mn[5], mx[5];
    for (int m = 0; m < 5; ++m) {
        double sum = 0.0;
        mn[m] = component(rows[0], m);
        mx[m] = mn[m];
        for (const auto& fv : rows) {
            const double v = component(fv, m);
            sum += v;
            mn[m] = std::min(mn[m], v);
            mx[m] = std::max(mx[m], v);
        }
        mean[m] = sum / static_cast<double>(n);
        double ss = 0.0;
        for (const auto& fv : rows) {
            const double d = component(fv, m) - mean[m];
            ss += d * d;
        }
        sd[m] = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    }

    std::printf("%-9s %6s %16s %16s %16s %16s\n", "Variable", "Obs", "Mean", "Std. Dev.",
                "Min", "Max");
    for (int m = 0; m < 5; ++m) {
        std::printf("%-9s %6zu %16s %16s %16s %16s\n", names[m], n,
                    format10(mean[m]).c_str(), format10(sd[m]).c_str(),
                    format10(mn[m]).c_str(), format10(mx[m]).c_str());
    }

    std::printf("\n%-9s", "Corr");
    for (int m = 0; m < 5; ++m) std::printf(" %8s", names[m]);
    std::printf("\n");
    for (int a = 0; a < 5; ++a) {
        std::printf("%-9s", names[a]);
        for (int b = 0; b <= a; ++b) {
            double cov = 0.0;
            for (const auto& fv : rows) {
                cov += (component(fv, a) - mean[a]) * (component(fv, b) - mean[b]);
            }
            const double denom_a = sd[a] * std::sqrt(static_cast<double>(n - 1));
            const double denom_b = sd[b] * std::sqrt(static_cast<double>(n - 1));
            if (n < 2 || denom_a == 0.0 || denom_b == 0.0) {
                std::printf(" %8s", "n/a");
            } else {
                std::printf(" %8.4f", cov / (denom_a * denom_b));
            }
        }
        std::printf("\n");
    }
    return kExitOk;
}

int cmd_synth(std::uint64_t seed, int n, double noise_sd,
              const std::optional<fs::path>& coeffs_path,
              const std::optional<fs::path>& config_path, int width, int height,
              const fs::path& out_dir) {
    iq::SynthOptions options;
    options.seed = seed;
    options.n = n;
    options.noise_sd = noise_sd;
    options.image_width = width;
    options.image_height = height;
    if (config_path) options.feature_config = iq::load_config(*config_path).features;
    if (coeffs_path) {
        const auto j = nlohmann::json::parse(read_text_file(*coeffs_path));
        for (const auto& [key, value] : j.items()) {
            options.coefficients[key] = value.get<double>();
        }
    }

    iq::generate_synthetic(options, out_dir);

    std::vector<fs::path> inputs;
    if (coeffs_path) inputs.push_back(*coeffs_path);
    if (config_path) inputs.push_back(*config_path);
    iq::write_manifest(
        out_dir, iq::make_manifest("synth", iq::hex64(iq::fingerprint(options.feature_config)),
                                   inputs));
    std::fprintf(stderr, "wrote %d synthetic records to %s\n", n, out_dir.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"information-quantity measures and hedonic price models for paintings"};
    app.set_version_flag("--version", iq::kVersion);
    app.require_subcommand(1);

    // extract
    auto* extract = app.add_subcommand("extract", "compute features for a catalog");
    fs::path catalog_path, image_root, out_dir, features_path, model_path;
    std::optional<fs::path> config_path;
    int threads = 1;
    bool fail_fast = false;
    extract->add_option("--catalog", catalog_path, "catalog CSV")->required();
    extract->add_option("--images", image_root, "image root directory")->required();
    extract->add_option("--config", config_path, "config JSON");
    extract->add_option("--out", out_dir, "output directory")->required();
    extract->add_option("--threads", threads, "worker threads");
    extract->add_flag("--fail-fast", fail_fast, "abort on first record error");

    // fit
    auto* fit = app.add_subcommand("fit", "fit the hedonic regression");
    std::optional<fs::path> spec_path;
    fit->add_option("--catalog", catalog_path, "catalog CSV")->required();
    fit->add_option("--features", features_path, "features CSV")->required();
    fit->add_option("--spec", spec_path, "config JSON (model section)");
    fit->add_option("--out", out_dir, "output directory")->required();

    // predict
    auto* predict = app.add_subcommand("predict", "price ratio between two feature rows");
    fs::path a_path, b_path;
    std::string a_id, b_id;
    predict->add_option("--model", model_path, "model JSON")->required();
    predict->add_option("--a", a_path, "features CSV for painting a")->required();
    predict->add_option("--a-id", a_id, "row id within --a");
    predict->add_option("--b", b_path, "features CSV for painting b")->required();
    predict->add_option("--b-id", b_id, "row id within --b");

    // summary
    auto* summary = app.add_subcommand("summary", "descriptive statistics of a features CSV");
    summary->add_option("--features", features_path, "features CSV")->required();

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic catalog");
    std::uint64_t seed = 1;
    int n = 720;
    double noise_sd = 0.9;
    int width = 192, height = 144;
    std::optional<fs::path> coeffs_path;
    synth->add_option("--seed", seed, "RNG seed");
    synth->add_option("--n", n, "number of records (>= 50)");
    synth->add_option("--noise", noise_sd, "log-price noise standard deviation");
    synth->add_option("--coeffs", coeffs_path, "JSON map of true coefficients");
    synth->add_option("--config", config_path, "config JSON (features section)");
    synth->add_option("--width", width, "image width");
    synth->add_option("--height", height, "image height");
    synth->add_option("--out", out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUnusable;
    }

    try {
        if (extract->parsed()) {
            return cmd_extract(catalog_path, image_root, config_path, out_dir, threads,
                               fail_fast);
        }
        if (fit->parsed()) return cmd_fit(catalog_path, features_path, spec_path, out_dir);
        if (predict->parsed()) return cmd_predict(model_path, a_path, a_id, b_path, b_id);
        if (summary->parsed()) return cmd_summary(features_path);
        if (synth->parsed()) {
            return cmd_synth(seed, n, noise_sd, coeffs_path, config_path, width, height,
                             out_dir);
        }
    } catch (const iq::RankDeficiencyError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUnusable;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUnusable;
    }
    return kExitUnusable;
}
