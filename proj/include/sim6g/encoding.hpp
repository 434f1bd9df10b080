#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sim6g {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

Bytes to_bytes(std::string_view s);

/// Lowercase hex.
std::string hex_encode(ByteView data);

/// Strict decoder: lowercase digits only, even length. Throws InputError.
Bytes hex_decode(std::string_view hex);

/// Base-58 with the Bitcoin alphabet; leading zero bytes map to '1'.
std::string base58_encode(ByteView data);

/// Throws InputError on characters outside the alphabet.
Bytes base58_decode(std::string_view text);

}  // namespace sim6g
