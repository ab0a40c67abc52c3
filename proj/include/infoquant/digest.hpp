#ifndef INFOQUANT_DIGEST_HPP
#define INFOQUANT_DIGEST_HPP

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace iq {

/// FNV-1a over a canonical string; used for config fingerprints.
std::uint64_t fnv1a64(std::string_view text);

std::string hex64(std::uint64_t v);
std::uint64_t parse_hex64(std::string_view text);

/// Hex SHA-256 of a byte buffer; used for image content hashes and
/// manifest input hashes.
std::string sha256_hex(std::span<const std::uint8_t> bytes);

}  // namespace iq

#endif  // INFOQUANT_DIGEST_HPP
