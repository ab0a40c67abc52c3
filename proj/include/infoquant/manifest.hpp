#ifndef INFOQUANT_MANIFEST_HPP
#define INFOQUANT_MANIFEST_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace iq {

/// Provenance sidecar: every output directory carries exactly one of
/// these describing how its artifacts were produced.
struct RunManifest {
    std::string command;
    std::string config_fingerprint;  // hex
    std::map<std::string, std::string> input_hashes;  // path -> sha256
    std::string tool_version;
    std::string timestamp;  // ISO 8601 UTC
};

RunManifest make_manifest(const std::string& command,
                          const std::string& config_fingerprint,
                          const std::vector<std::filesystem::path>& inputs);

void write_manifest(const std::filesystem::path& out_dir, const RunManifest& manifest);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes);
void write_file_text(const std::filesystem::path& path, const std::string& text);

}  // namespace iq

#endif  // INFOQUANT_MANIFEST_HPP
