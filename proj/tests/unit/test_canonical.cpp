#include <gtest/gtest.h>

#include <random>

#include "sim6g/canonical.hpp"
#include "sim6g/errors.hpp"

using namespace sim6g;

namespace {

// Independent reference: sorted keys, no whitespace, minimal escapes,
// UTF-8 passed through, integers in decimal.
std::string ref_string(const std::string& s) {
  std::string out = "\"";
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out + "\"";
}

std::string ref_canon(const Value& v) {
  if (v.is_null()) return "null";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_string()) return ref_string(v.get<std::string>());
  std::string out;
  if (v.is_array()) {
    out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + ref_canon(v[i]);
    return out + "]";
  }
  std::vector<std::string> keys;
  for (const auto& [k, _] : v.items()) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  out = "{";
  for (std::size_t i = 0; i < keys.size(); ++i) out += (i ? "," : "") + ref_string(keys[i]) + ":" + ref_canon(v[keys[i]]);
  return out + "}";
}

Value random_value(std::mt19937_64& rng, int depth) {
  switch (depth > 3 ? rng() % 4 : rng() % 6) {
    case 0: return nullptr;
    case 1: return rng() % 2 == 0;
    case 2: return static_cast<std::int64_t>(rng()) >> (rng() % 60);
    case 3: {
      std::string s;
      for (int i = 0, n = static_cast<int>(rng() % 8); i < n; ++i) s += static_cast<char>(1 + rng() % 126);
      return s;
    }
    case 4: {
      Value a = Value::array();
      for (int i = 0, n = static_cast<int>(rng() % 4); i < n; ++i) a.push_back(random_value(rng, depth + 1));
      return a;
    }
    default: {
      Value o = Value::object();
      for (int i = 0, n = static_cast<int>(rng() % 4); i < n; ++i) {
        o["k" + std::to_string(rng() % 20)] = random_value(rng, depth + 1);
      }
      return o;
    }
  }
}

}  // namespace

TEST(Canonical, FrozenDigests) {
  EXPECT_EQ(canonical_digest(parse_value(R"({"b":1,"a":2})")).hex(),
            "d3626ac30a87e6f7a6428233b3c68299976865fa5508e4267c5415c76af7a772");
  EXPECT_EQ(canonical_digest(Value::object()).hex(),
            "44136fa355b3678a1146ad16f7e8649e94fb4fc21fe77e8310c060f61caaff8a");
  auto doc = parse_value(
      R"({"version":3,"id":"did:sim6g:x","controller":null,"deactivated":false,"services":[],)"
      R"("verification_methods":[{"purposes":["authentication","assertion"],"id":"#key-0"}]})");
  EXPECT_EQ(canonical_digest(doc).hex(), "ef06eb43385cbc274f8daf33130af7485f628751879dee976d475b95ce4fa76e");
  auto tricky = parse_value(
      "{\"z\":[1,-2,{\"y\":\"caf\xc3\xa9\",\"x\":\"tab\\there\"}],\"q\":\"a\\\"b\\\\c/\","
      "\"emoji\":\"\xf0\x9f\x93\xb6\",\"ctl\":\"\\u0001\"}");
  EXPECT_EQ(canonical_digest(tricky).hex(), "5034da73931086b5e4d25e1ee06d0f6d57d67175c7f39548dab2762c96627ac3");
}

TEST(Canonical, MatchesReferenceImplementation) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    auto v = random_value(rng, 0);
    auto text = canonicalize(v);
    ASSERT_EQ(text, ref_canon(v));
    ASSERT_EQ(parse_canonical(text), v);
  }
}

TEST(Canonical, RejectsFloatsAndDuplicates) {
  EXPECT_THROW(parse_value("{\"a\":1.5}"), CanonicalizationError);
  EXPECT_THROW(parse_value("{\"a\":1,\"a\":2}"), CanonicalizationError);
  EXPECT_THROW(canonicalize(Value(2.5)), CanonicalizationError);
  EXPECT_THROW(parse_value("{\"a\":"), InputError);
}

TEST(Canonical, ParseCanonicalRequiresCanonicalBytes) {
  EXPECT_NO_THROW(parse_canonical(R"({"a":1,"b":2})"));
  EXPECT_THROW(parse_canonical(R"({"b":2,"a":1})"), InputError);
  EXPECT_THROW(parse_canonical(R"({"a": 1})"), InputError);
  EXPECT_THROW(parse_canonical(R"({"a":"\u0061"})"), InputError);
}

TEST(Canonical, FieldHelpers) {
  auto v = parse_value(R"({"s":"x","i":-3,"u":4,"b":true})");
  EXPECT_EQ(require_string(v, "s"), "x");
  EXPECT_EQ(require_int(v, "i"), -3);
  EXPECT_EQ(require_uint(v, "u"), 4u);
  EXPECT_TRUE(require_bool(v, "b"));
  EXPECT_THROW(require_uint(v, "i"), InputError);
  EXPECT_THROW(require_string(v, "missing"), InputError);
  EXPECT_THROW(require_exact_keys(v, {"s", "i", "u"}), InputError);
  EXPECT_NO_THROW(require_exact_keys(v, {"s", "i", "u", "b"}));
}
