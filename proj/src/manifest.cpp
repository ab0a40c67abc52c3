#include "infoquant/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "infoquant/digest.hpp"
#include "infoquant/errors.hpp"
#include "infoquant/version.hpp"

namespace iq {

namespace {

std::string utc_now_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

}  // namespace

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("short write to " + path.string());
}

void write_file_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file " + path.string());
    out << text;
    if (!out) throw Error("short write to " + path.string());
}

RunManifest make_manifest(const std::string& command,
                          const std::string& config_fingerprint,
                          const std::vector<std::filesystem::path>& inputs) {
    RunManifest manifest;
    manifest.command = command;
    manifest.config_fingerprint = config_fingerprint;
    manifest.tool_version = kVersion;
    manifest.timestamp = utc_now_iso8601();
    for (const auto& path : inputs) {
        const auto bytes = read_file_bytes(path);
        manifest.input_hashes[path.string()] = sha256_hex(bytes);
    }
    return manifest;
}

void write_manifest(const std::filesystem::path& out_dir, const RunManifest& manifest) {
    nlohmann::json j{{"command", manifest.command},
                     {"config_fingerprint", manifest.config_fingerprint},
                     {"input_hashes", manifest.input_hashes},
                     {"tool_version", manifest.tool_version},
                     {"timestamp", manifest.timestamp}};
    write_file_text(out_dir / "manifest.json", j.dump(2) + "\n");
}

}  // namespace iq
