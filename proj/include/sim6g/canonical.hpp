#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>
#include "sim6g/crypto.hpp"

namespace sim6g {

/// Structured values: maps, lists, strings, integers, booleans, null.
using Value = nlohmann::json;

/// Sorted-key, whitespace-free UTF-8 JSON text. Throws CanonicalizationError
/// for floating-point numbers or invalid UTF-8.
std::string canonicalize(const Value& value);

/// Parses JSON text, rejecting floats and duplicate object keys with
/// CanonicalizationError and syntax errors with InputError.
Value parse_value(std::string_view text);

/// Like parse_value, but additionally requires the text to be byte-identical
/// to the canonical form of the parsed value.
Value parse_canonical(std::string_view text);

/// content_id over the canonical bytes.
crypto::Digest canonical_digest(const Value& value);

/// Typed field accessors that throw InputError naming the field.
const Value& require_field(const Value& obj, std::string_view name);
std::string require_string(const Value& obj, std::string_view name);
std::int64_t require_int(const Value& obj, std::string_view name);
std::uint64_t require_uint(const Value& obj, std::string_view name);
bool require_bool(const Value& obj, std::string_view name);

/// Throws InputError if obj is not an object with exactly these keys.
void require_exact_keys(const Value& obj, std::initializer_list<std::string_view> keys);

}  // namespace sim6g
