#ifndef INFOQUANT_SYNTH_HPP
#define INFOQUANT_SYNTH_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "infoquant/features.hpp"
#include "infoquant/hedonic.hpp"

namespace iq {

/// Deterministic stand-in for the proprietary auction sample: random
/// geometric compositions with known features, attributes drawn from fixed
/// distributions, and log prices generated from the hedonic equation.
struct SynthOptions {
    std::uint64_t seed = 1;
    int n = 720;
    double noise_sd = 0.9;
    std::map<std::string, double> coefficients;  // empty: defaults; merged over them otherwise
    int image_width = 192;
    int image_height = 144;
    FeatureConfig feature_config;
};

struct SynthResult {
    std::vector<SaleRecord> records;      // prices already set
    std::vector<FeatureVector> features;  // true features, aligned with records
    std::map<std::string, double> coefficients;  // truth per generated design column
    ModelSpec model_spec;                 // the specification the data was built from
};

/// Coefficients used when SynthOptions::coefficients is empty.
std::map<std::string, double> default_true_coefficients();

/// Generates the sample. When out_dir is non-empty, writes catalog.csv,
/// images/*.png and ground_truth.json there. Same options, same bytes.
SynthResult generate_synthetic(const SynthOptions& options,
                               const std::filesystem::path& out_dir = {});

}  // namespace iq

#endif  // INFOQUANT_SYNTH_HPP
