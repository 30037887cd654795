#include "dinilab/runner/json_reader.hpp"

#include <cmath>
#include <limits>

#include "dinilab/errors.hpp"

namespace dinilab::runner {

double json_number(const Json& value, const std::string& context) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const auto text = value.get<std::string>();
    if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  }
  throw ValidationError(context + ": expected a number, got " + value.dump());
}

JsonReader::JsonReader(const Json& object, std::string context) : object_(object), context_(std::move(context)) {
  if (!object_.is_object()) throw ValidationError(context_ + ": expected a JSON object, got " + object_.dump());
}

bool JsonReader::has(const std::string& key) const { return object_.contains(key); }

const Json& JsonReader::lookup(const std::string& key) {
  seen_.insert(key);
  const auto it = object_.find(key);
  if (it == object_.end()) throw ValidationError(child_context(key) + ": required key is missing");
  return *it;
}

const Json& JsonReader::raw(const std::string& key) { return lookup(key); }

std::optional<Json> JsonReader::raw_optional(const std::string& key) {
  seen_.insert(key);
  const auto it = object_.find(key);
  if (it == object_.end()) return std::nullopt;
  return std::optional<Json>(std::in_place, *it);
}

double JsonReader::number(const std::string& key) { return json_number(lookup(key), child_context(key)); }

double JsonReader::number(const std::string& key, double fallback) {
  return has(key) ? number(key) : (seen_.insert(key), fallback);
}

std::optional<double> JsonReader::optional_number(const std::string& key) {
  if (!has(key)) return std::nullopt;
  return number(key);
}

std::uint64_t JsonReader::count(const std::string& key) {
  const Json& v = lookup(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
  }
  throw ValidationError(child_context(key) + ": expected a non-negative integer, got " + v.dump());
}

std::uint64_t JsonReader::count(const std::string& key, std::uint64_t fallback) {
  return has(key) ? count(key) : (seen_.insert(key), fallback);
}

std::string JsonReader::string(const std::string& key) {
  const Json& v = lookup(key);
  if (!v.is_string()) throw ValidationError(child_context(key) + ": expected a string, got " + v.dump());
  return v.get<std::string>();
}

std::string JsonReader::string(const std::string& key, const std::string& fallback) {
  return has(key) ? string(key) : (seen_.insert(key), fallback);
}

bool JsonReader::boolean(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  const Json& v = lookup(key);
  if (!v.is_boolean()) throw ValidationError(child_context(key) + ": expected true or false, got " + v.dump());
  return v.get<bool>();
}

std::vector<double> JsonReader::numbers(const std::string& key) {
  const Json& v = lookup(key);
  if (!v.is_array()) throw ValidationError(child_context(key) + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(json_number(v[i], child_context(key) + "[" + std::to_string(i) + "]"));
  return out;
}

std::array<double, 2> JsonReader::pair(const std::string& key, std::array<double, 2> fallback) {
  if (!has(key)) return fallback;
  const Json& v = lookup(key);
  if (v.is_number()) return {v.get<double>(), 0.0};
  const std::vector<double> values = numbers(key);
  if (values.empty() || values.size() > 2)
    throw ValidationError(child_context(key) + ": expected one or two numbers");
  return {values[0], values.size() == 2 ? values[1] : 0.0};
}

void JsonReader::finish() const {
  std::string unknown;
  for (const auto& item : object_.items()) {
    if (seen_.count(item.key()) != 0) continue;
    unknown += (unknown.empty() ? "" : ", ") + item.key();
  }
  if (!unknown.empty()) throw ValidationError(context_ + ": unknown key(s): " + unknown);
}

}  // namespace dinilab::runner
