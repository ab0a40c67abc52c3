#ifndef INFOQUANT_CONFIG_HPP
#define INFOQUANT_CONFIG_HPP

#include <filesystem>
#include <string>

#include "infoquant/features.hpp"
#include "infoquant/hedonic.hpp"

namespace iq {

/// The single JSON config file: a "features" section mirroring
/// FeatureConfig and a "model" section mirroring ModelSpec. Either
/// section may be omitted; defaults apply field by field.
struct ToolConfig {
    FeatureConfig features;
    ModelSpec model;
};

ToolConfig load_config(const std::filesystem::path& path);
ToolConfig parse_config(const std::string& text);

std::string feature_config_json(const FeatureConfig& cfg);  // canonical form
std::string model_spec_json(const ModelSpec& spec);         // canonical form

}  // namespace iq

#endif  // INFOQUANT_CONFIG_HPP
