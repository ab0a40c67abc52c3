#include "infoquant/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "infoquant/digest.hpp"

namespace iq {

namespace {

using nlohmann::json;

json dummy_family_json(const DummyFamily& family) {
    return json{{"levels", family.levels}, {"base", family.base}};
}

DummyFamily dummy_family_from(const json& j, DummyFamily defaults) {
    DummyFamily family = std::move(defaults);
    if (j.contains("levels")) family.levels = j.at("levels").get<std::vector<std::string>>();
    if (j.contains("base")) family.base = j.at("base").get<std::string>();
    if (std::find(family.levels.begin(), family.levels.end(), family.base) ==
        family.levels.end()) {
        throw ParseError("dummy family '" + family.name + "' base level '" + family.base +
                             "' is not one of its declared levels",
                         0);
    }
    return family;
}

const char* info_term_key(InfoTerm t) {
    switch (t) {
        case InfoTerm::line: return "v_line";
        case InfoTerm::color: return "v_color";
        case InfoTerm::value: return "v_value";
        case InfoTerm::shape: return "v_shape";
        case InfoTerm::space: return "v_space";
    }
    return "";
}

InfoTerm info_term_from_key(const std::string& key) {
    if (key == "v_line") return InfoTerm::line;
    if (key == "v_color") return InfoTerm::color;
    if (key == "v_value") return InfoTerm::value;
    if (key == "v_shape") return InfoTerm::shape;
    if (key == "v_space") return InfoTerm::space;
    throw ParseError("unknown information term '" + key + "'", 0);
}

}  // namespace

std::string feature_config_json(const FeatureConfig& cfg) {
    json j{{"edge_threshold", cfg.edge_threshold},
           {"resize_max_dim", cfg.resize_max_dim},
           {"statistic_mode", cfg.statistic_mode == StatisticMode::variance ? "variance"
                                                                            : "std_dev"},
           {"ssim_floor", cfg.ssim_floor},
           {"hue_scale", cfg.hue_scale},
           {"space_normalize_by_count", cfg.space_normalize_by_count}};
    return j.dump();
}

std::string model_spec_json(const ModelSpec& spec) {
    json terms = json::array();
    for (InfoTerm t : spec.information_terms) terms.push_back(info_term_key(t));
    json j{{"information_terms", terms},
           {"line_quadratic", spec.line_quadratic},
           {"log_scale_factor", spec.log_scale_factor},
           {"material", dummy_family_json(spec.material)},
           {"city", dummy_family_json(spec.city)},
           {"salesroom", dummy_family_json(spec.salesroom)}};
    j["year_base"] = spec.year_base ? json(*spec.year_base) : json(nullptr);
    return j.dump();
}

std::uint64_t fingerprint(const FeatureConfig& cfg) {
    return fnv1a64(feature_config_json(cfg));
}

std::uint64_t fingerprint(const ModelSpec& spec) {
    return fnv1a64(model_spec_json(spec));
}

ToolConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what(), 0);
    }

    ToolConfig config;
    if (j.contains("features")) {
        const json& f = j.at("features");
        FeatureConfig& cfg = config.features;
        if (f.contains("edge_threshold")) cfg.edge_threshold = f.at("edge_threshold").get<double>();
        if (f.contains("resize_max_dim")) cfg.resize_max_dim = f.at("resize_max_dim").get<int>();
        if (f.contains("statistic_mode")) {
            const std::string mode = f.at("statistic_mode").get<std::string>();
            if (mode == "variance") {
                cfg.statistic_mode = StatisticMode::variance;
            } else if (mode == "std_dev") {
                cfg.statistic_mode = StatisticMode::std_dev;
            } else {
                throw ParseError("statistic_mode must be 'variance' or 'std_dev'", 0);
            }
        }
        if (f.contains("ssim_floor")) cfg.ssim_floor = f.at("ssim_floor").get<double>();
        if (f.contains("hue_scale")) cfg.hue_scale = f.at("hue_scale").get<double>();
        if (f.contains("space_normalize_by_count")) {
            cfg.space_normalize_by_count = f.at("space_normalize_by_count").get<bool>();
        }
        if (!(cfg.edge_threshold > 0.0)) throw ParseError("edge_threshold must be > 0", 0);
        if (cfg.resize_max_dim < 1) throw ParseError("resize_max_dim must be >= 1", 0);
        if (!(cfg.ssim_floor > 0.0 && cfg.ssim_floor < 1.0)) {
            throw ParseError("ssim_floor must lie in (0, 1)", 0);
        }
        if (!(cfg.hue_scale > 0.0)) throw ParseError("hue_scale must be > 0", 0);
    }
    if (j.contains("model")) {
        const json& m = j.at("model");
        ModelSpec& spec = config.model;
        if (m.contains("information_terms")) {
            spec.information_terms.clear();
            for (const auto& key : m.at("information_terms")) {
                spec.information_terms.push_back(info_term_from_key(key.get<std::string>()));
            }
        }
        if (m.contains("line_quadratic")) spec.line_quadratic = m.at("line_quadratic").get<bool>();
        if (m.contains("log_scale_factor")) {
            spec.log_scale_factor = m.at("log_scale_factor").get<double>();
            if (!(spec.log_scale_factor > 0.0)) {
                throw ParseError("log_scale_factor must be > 0", 0);
            }
        }
        if (m.contains("material")) {
            spec.material = dummy_family_from(m.at("material"), spec.material);
        }
        if (m.contains("city")) spec.city = dummy_family_from(m.at("city"), spec.city);
        if (m.contains("salesroom")) {
            spec.salesroom = dummy_family_from(m.at("salesroom"), spec.salesroom);
        }
        if (m.contains("year_base") && !m.at("year_base").is_null()) {
            spec.year_base = m.at("year_base").get<int>();
        }
    }
    return config;
}

ToolConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file " + path.string(), 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace iq
