#pragma once

// Reader for the subset of TOML used by configuration files: [table] and
// [dotted.table] headers, bare or quoted keys, basic/literal strings, integers,
// floats, booleans, and single-line arrays of those scalars. Inline tables,
// arrays of tables, multi-line strings and dates are rejected.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fewl::util {

struct TomlValue;
using TomlArray = std::vector<TomlValue>;

struct TomlValue {
  std::variant<std::string, std::int64_t, double, bool, TomlArray> data;

  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(data); }
  bool is_float() const { return std::holds_alternative<double>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_array() const { return std::holds_alternative<TomlArray>(data); }
};

// Flat view: keys are fully qualified, e.g. "scoring.divergence".
class TomlDocument {
 public:
  static TomlDocument parse(std::string_view text);
  static TomlDocument load(const std::string& path);

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  const TomlValue* find(const std::string& key) const;

  // Typed accessors throw ConfigError naming the key on a type mismatch.
  std::optional<std::string> get_string(const std::string& key) const;
  std::optional<std::int64_t> get_int(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;  // accepts ints
  std::optional<bool> get_bool(const std::string& key) const;
  std::optional<std::vector<std::string>> get_string_array(const std::string& key) const;
  std::optional<std::vector<double>> get_double_array(const std::string& key) const;

  // Names of the sub-tables directly under `prefix` ("providers" -> {"gpt4", ...}).
  std::vector<std::string> subtables(const std::string& prefix) const;

  const std::map<std::string, TomlValue>& values() const { return values_; }

 private:
  std::map<std::string, TomlValue> values_;
};

}  // namespace fewl::util
