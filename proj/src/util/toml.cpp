#include "fewl/util/toml.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "fewl/core/error.hpp"

namespace fewl::util {
namespace {

class LineParser {
 public:
  LineParser(std::string_view line, int line_no) : s_(line), line_no_(line_no) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no_),
                "TOML parse error at line " + std::to_string(line_no_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  bool at_end_or_comment() {
    skip_ws();
    return pos_ >= s_.size() || s_[pos_] == '#';
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string key_part() {
    skip_ws();
    if (peek() == '"') return basic_string();
    if (peek() == '\'') return literal_string();
    const std::size_t start = pos_;
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
        ++pos_;
      } else {
        break;
      }
    }
    if (start == pos_) fail("empty key");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string dotted_key() {
    std::string key = key_part();
    for (;;) {
      skip_ws();
      if (peek() != '.') break;
      ++pos_;
      key += '.';
      key += key_part();
    }
    return key;
  }

  std::string basic_string() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < s_.size()) {
      const char c = s_[pos_++];
      if (c == '"') return out;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (pos_ >= s_.size()) break;
      const char e = s_[pos_++];
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        default: fail(std::string("unsupported escape \\") + e);
      }
    }
    fail("unterminated string");
  }

  std::string literal_string() {
    ++pos_;
    const std::size_t end = s_.find('\'', pos_);
    if (end == std::string_view::npos) fail("unterminated literal string");
    std::string out(s_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return out;
  }

  TomlValue value() {
    skip_ws();
    const char c = peek();
    if (c == '"') {
      if (s_.substr(pos_, 3) == "\"\"\"") fail("multi-line strings are not supported");
      return {basic_string()};
    }
    if (c == '\'') return {literal_string()};
    if (c == '[') return {array()};
    if (c == '{') fail("inline tables are not supported");
    if (s_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return {true};
    }
    if (s_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return {false};
    }
    return number();
  }

  TomlArray array() {
    ++pos_;
    TomlArray out;
    for (;;) {
      skip_ws();
      if (peek() == ']') {
        ++pos_;
        return out;
      }
      if (pos_ >= s_.size()) fail("unterminated array (arrays must fit on one line)");
      out.push_back(value());
      skip_ws();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
  }

  TomlValue number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.' || c == '_') {
        ++pos_;
      } else {
        break;
      }
    }
    std::string tok;
    for (char c : s_.substr(start, pos_ - start)) {
      if (c != '_') tok.push_back(c);
    }
    if (tok.empty()) fail("expected a value");
    if (tok == "inf" || tok == "+inf") return {std::numeric_limits<double>::infinity()};
    if (tok == "-inf") return {-std::numeric_limits<double>::infinity()};
    const bool is_float = tok.find_first_of(".eE") != std::string::npos;
    const char* first = tok.data();
    if (*first == '+') ++first;
    const char* last = tok.data() + tok.size();
    if (is_float) {
      double d = 0;
      auto [p, ec] = std::from_chars(first, last, d);
      if (ec != std::errc() || p != last) fail("invalid float '" + tok + "'");
      return {d};
    }
    std::int64_t i = 0;
    auto [p, ec] = std::from_chars(first, last, i);
    if (ec != std::errc() || p != last) fail("invalid value '" + tok + "'");
    return {i};
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  int line_no_;
};

}  // namespace

TomlDocument TomlDocument::parse(std::string_view text) {
  TomlDocument doc;
  std::string table;
  std::set<std::string> seen_tables;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    start = end + 1;

    LineParser p(line, line_no);
    if (p.at_end_or_comment()) {
      if (end == text.size()) break;
      continue;
    }
    if (p.peek() == '[') {
      p.expect('[');
      if (p.peek() == '[') p.fail("arrays of tables are not supported");
      table = p.dotted_key();
      p.expect(']');
      if (!p.at_end_or_comment()) p.fail("trailing characters after table header");
      if (!seen_tables.insert(table).second) p.fail("duplicate table [" + table + "]");
    } else {
      std::string key = p.dotted_key();
      p.expect('=');
      TomlValue v = p.value();
      if (!p.at_end_or_comment()) p.fail("trailing characters after value");
      std::string full = table.empty() ? key : table + "." + key;
      if (doc.values_.count(full)) p.fail("duplicate key '" + full + "'");
      doc.values_.emplace(std::move(full), std::move(v));
    }
    if (end == text.size()) break;
  }
  return doc;
}

TomlDocument TomlDocument::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, path, "cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const TomlValue* TomlDocument::find(const std::string& key) const {
  auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

namespace {
[[noreturn]] void type_error(const std::string& key, const char* expected) {
  throw Error(ErrorCode::ConfigError, key, "config key " + key + " must be " + expected);
}
}  // namespace

std::optional<std::string> TomlDocument::get_string(const std::string& key) const {
  const TomlValue* v = find(key);
  if (!v) return std::nullopt;
  if (!v->is_string()) type_error(key, "a string");
  return std::get<std::string>(v->data);
}

std::optional<std::int64_t> TomlDocument::get_int(const std::string& key) const {
  const TomlValue* v = find(key);
  if (!v) return std::nullopt;
  if (!v->is_int()) type_error(key, "an integer");
  return std::get<std::int64_t>(v->data);
}

std::optional<double> TomlDocument::get_double(const std::string& key) const {
  const TomlValue* v = find(key);
  if (!v) return std::nullopt;
  if (v->is_int()) return static_cast<double>(std::get<std::int64_t>(v->data));
  if (!v->is_float()) type_error(key, "a number");
  return std::get<double>(v->data);
}

std::optional<bool> TomlDocument::get_bool(const std::string& key) const {
  const TomlValue* v = find(key);
  if (!v) return std::nullopt;
  if (!v->is_bool()) type_error(key, "a boolean");
  return std::get<bool>(v->data);
}

std::optional<std::vector<std::string>> TomlDocument::get_string_array(const std::string& key) const {
  const TomlValue* v = find(key);
  if (!v) return std::nullopt;
  if (!v->is_array()) type_error(key, "an array of strings");
  std::vector<std::string> out;
  for (const auto& e : std::get<TomlArray>(v->data)) {
    if (!e.is_string()) type_error(key, "an array of strings");
    out.push_back(std::get<std::string>(e.data));
  }
  return out;
}

std::optional<std::vector<double>> TomlDocument::get_double_array(const std::string& key) const {
  const TomlValue* v = find(key);
  if (!v) return std::nullopt;
  if (!v->is_array()) type_error(key, "an array of numbers");
  std::vector<double> out;
  for (const auto& e : std::get<TomlArray>(v->data)) {
    if (e.is_int()) {
      out.push_back(static_cast<double>(std::get<std::int64_t>(e.data)));
    } else if (e.is_float()) {
      out.push_back(std::get<double>(e.data));
    } else {
      type_error(key, "an array of numbers");
    }
  }
  return out;
}

std::vector<std::string> TomlDocument::subtables(const std::string& prefix) const {
  std::set<std::string> names;
  const std::string p = prefix + ".";
  for (const auto& [key, _] : values_) {
    if (key.rfind(p, 0) != 0) continue;
    const std::string rest = key.substr(p.size());
    const auto dot = rest.find('.');
    if (dot != std::string::npos) names.insert(rest.substr(0, dot));
  }
  return {names.begin(), names.end()};
}

}  // namespace fewl::util
