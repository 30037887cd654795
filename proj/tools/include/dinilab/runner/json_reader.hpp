/// @file json_reader.hpp
/// @brief Strict typed access to JSON config objects. Every accessor names
/// the offending key in its ValidationError, and finish() rejects keys that
/// were never read so typos do not pass silently.
#pragma once

#include <array>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace dinilab::runner {

using Json = nlohmann::json;

class JsonReader {
 public:
  /// `context` prefixes every diagnostic, e.g. "renorm.sigma".
  JsonReader(const Json& object, std::string context);

  bool has(const std::string& key) const;
  const Json& raw(const std::string& key);
  std::optional<Json> raw_optional(const std::string& key);

  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  std::optional<double> optional_number(const std::string& key);
  std::uint64_t count(const std::string& key);
  std::uint64_t count(const std::string& key, std::uint64_t fallback);
  std::string string(const std::string& key);
  std::string string(const std::string& key, const std::string& fallback);
  bool boolean(const std::string& key, bool fallback);
  std::vector<double> numbers(const std::string& key);
  /// One or two numbers; a scalar is accepted as a one-element vector.
  std::array<double, 2> pair(const std::string& key, std::array<double, 2> fallback);

  std::string child_context(const std::string& key) const { return context_ + "." + key; }
  const std::string& context() const { return context_; }

  /// Throws ValidationError listing keys that were present but never read.
  void finish() const;

 private:
  const Json& lookup(const std::string& key);
  const Json& object_;
  std::string context_;
  std::set<std::string> seen_;
};

/// A JSON number, or the strings "inf"/"infinity" for +infinity.
double json_number(const Json& value, const std::string& context);

}  // namespace dinilab::runner
