#include "sim6g/canonical.hpp"

#include <set>
#include <vector>

#include "sim6g/errors.hpp"

namespace sim6g {
namespace {

void reject_floats(const Value& v) {
  switch (v.type()) {
    case Value::value_t::number_float:
      throw CanonicalizationError("floating-point numbers cannot be canonicalized");
    case Value::value_t::binary:
      throw CanonicalizationError("binary values cannot be canonicalized");
    case Value::value_t::discarded:
      throw CanonicalizationError("discarded value");
    case Value::value_t::object:
    case Value::value_t::array:
      for (const auto& child : v) reject_floats(child);
      break;
    default:
      break;
  }
}

// Builds a Value from SAX events, stopping at the first float or duplicate key.
class StrictBuilder {
 public:
  using number_integer_t = Value::number_integer_t;
  using number_unsigned_t = Value::number_unsigned_t;
  using number_float_t = Value::number_float_t;
  using string_t = Value::string_t;
  using binary_t = Value::binary_t;

  bool null() { return put(Value(nullptr)); }
  bool boolean(bool b) { return put(Value(b)); }
  bool number_integer(number_integer_t n) { return put(Value(n)); }
  bool number_unsigned(number_unsigned_t n) { return put(Value(n)); }
  bool number_float(number_float_t, const string_t& text) {
    return fail(Kind::Canonical, "floating-point number '" + text + "' not allowed");
  }
  bool string(string_t& s) { return put(Value(std::move(s))); }
  bool binary(binary_t&) { return fail(Kind::Canonical, "binary values not allowed"); }

  bool start_object(std::size_t) {
    if (!put(Value::object())) return false;
    frames_.push_back({last_, {}});
    return true;
  }
  bool key(string_t& k) {
    auto& frame = frames_.back();
    if (!frame.keys.insert(k).second) return fail(Kind::Canonical, "duplicate key '" + k + "'");
    pending_key_ = std::move(k);
    return true;
  }
  bool end_object() {
    frames_.pop_back();
    return true;
  }
  bool start_array(std::size_t) {
    if (!put(Value::array())) return false;
    frames_.push_back({last_, {}});
    return true;
  }
  bool end_array() {
    frames_.pop_back();
    return true;
  }
  bool parse_error(std::size_t position, const std::string&, const nlohmann::detail::exception& ex) {
    return fail(Kind::Syntax, "parse error at byte " + std::to_string(position) + ": " + ex.what());
  }

  void rethrow() const {
    if (kind_ == Kind::Canonical) throw CanonicalizationError(message_);
    if (kind_ == Kind::Syntax) throw InputError(message_);
  }

  Value take() { return std::move(root_); }

 private:
  enum class Kind { None, Canonical, Syntax };
  struct Frame {
    Value* container;
    std::set<std::string> keys;
  };

  bool put(Value v) {
    if (frames_.empty()) {
      root_ = std::move(v);
      last_ = &root_;
      return true;
    }
    Value* parent = frames_.back().container;
    if (parent->is_object()) {
      last_ = &((*parent)[pending_key_] = std::move(v));
    } else {
      parent->push_back(std::move(v));
      last_ = &parent->back();
    }
    return true;
  }

  bool fail(Kind kind, std::string msg) {
    if (kind_ == Kind::None) {
      kind_ = kind;
      message_ = std::move(msg);
    }
    return false;
  }

  Value root_;
  Value* last_ = nullptr;
  std::vector<Frame> frames_;
  std::string pending_key_;
  Kind kind_ = Kind::None;
  std::string message_;
};

}  // namespace

std::string canonicalize(const Value& value) {
  reject_floats(value);
  try {
    return value.dump(-1, ' ', false, Value::error_handler_t::strict);
  } catch (const nlohmann::json::exception& ex) {
    throw CanonicalizationError(std::string("cannot canonicalize: ") + ex.what());
  }
}

Value parse_value(std::string_view text) {
  StrictBuilder builder;
  bool ok = false;
  try {
    ok = Value::sax_parse(text.begin(), text.end(), &builder);
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("invalid JSON: ") + ex.what());
  }
  if (!ok) {
    builder.rethrow();
    throw InputError("invalid JSON");
  }
  return builder.take();
}

Value parse_canonical(std::string_view text) {
  Value v = parse_value(text);
  if (canonicalize(v) != text) throw InputError("value is not in canonical form");
  return v;
}

crypto::Digest canonical_digest(const Value& value) {
  auto text = canonicalize(value);
  return crypto::content_id(to_bytes(text));
}

const Value& require_field(const Value& obj, std::string_view name) {
  if (!obj.is_object()) throw InputError("expected an object containing '" + std::string(name) + "'");
  auto it = obj.find(std::string(name));
  if (it == obj.end()) throw InputError("missing field '" + std::string(name) + "'");
  return *it;
}

std::string require_string(const Value& obj, std::string_view name) {
  const auto& v = require_field(obj, name);
  if (!v.is_string()) throw InputError("field '" + std::string(name) + "' must be a string");
  return v.get<std::string>();
}

std::int64_t require_int(const Value& obj, std::string_view name) {
  const auto& v = require_field(obj, name);
  if (v.is_number_unsigned()) {
    auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(INT64_MAX)) {
      throw InputError("field '" + std::string(name) + "' out of range");
    }
    return static_cast<std::int64_t>(u);
  }
  if (!v.is_number_integer()) throw InputError("field '" + std::string(name) + "' must be an integer");
  return v.get<std::int64_t>();
}

std::uint64_t require_uint(const Value& obj, std::string_view name) {
  auto n = require_int(obj, name);
  if (n < 0) throw InputError("field '" + std::string(name) + "' must be non-negative");
  return static_cast<std::uint64_t>(n);
}

bool require_bool(const Value& obj, std::string_view name) {
  const auto& v = require_field(obj, name);
  if (!v.is_boolean()) throw InputError("field '" + std::string(name) + "' must be a boolean");
  return v.get<bool>();
}

void require_exact_keys(const Value& obj, std::initializer_list<std::string_view> keys) {
  if (!obj.is_object()) throw InputError("expected an object");
  if (obj.size() != keys.size()) throw InputError("unexpected set of fields");
  for (auto k : keys) {
    if (!obj.contains(std::string(k))) throw InputError("missing field '" + std::string(k) + "'");
  }
}

}  // namespace sim6g
