#include "toml.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace rigidflow {

namespace {

std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Removes a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

bool parse_number(const std::string& s, double& out) {
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end && *end == '\0' && end != s.c_str();
}

std::vector<std::string> split_items(const std::string& body) {
  std::vector<std::string> items;
  std::string cur;
  bool in_str = false;
  for (char c : body) {
    if (c == '"') in_str = !in_str;
    if (c == ',' && !in_str) {
      items.push_back(strip(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  const std::string last = strip(cur);
  if (!last.empty()) items.push_back(last);
  return items;
}

}  // namespace

TomlTable TomlTable::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

TomlTable TomlTable::parse(const std::string& text, const std::string& origin) {
  TomlTable t;
  t.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw Error(ErrorCode::ConfigInvalid,
                    origin + ":" + std::to_string(lineno) + ": malformed section header");
      section = strip(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::ConfigInvalid,
                  origin + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = strip(line.substr(0, eq));
    std::string val = strip(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw Error(ErrorCode::ConfigInvalid,
                  origin + ":" + std::to_string(lineno) + ": empty key or value");
    if (!section.empty()) key = section + "." + key;

    Value v;
    if (val.front() == '"') {
      if (val.size() < 2 || val.back() != '"')
        throw Error(ErrorCode::ConfigInvalid,
                    origin + ":" + std::to_string(lineno) + ": unterminated string");
      v.kind = Value::Kind::String;
      v.str = val.substr(1, val.size() - 2);
    } else if (val == "true" || val == "false") {
      v.kind = Value::Kind::Bool;
      v.flag = val == "true";
    } else if (val.front() == '[') {
      if (val.back() != ']')
        throw Error(ErrorCode::ConfigInvalid,
                    origin + ":" + std::to_string(lineno) + ": unterminated array");
      const auto items = split_items(val.substr(1, val.size() - 2));
      const bool strings = !items.empty() && items.front().front() == '"';
      if (strings) {
        v.kind = Value::Kind::StringArray;
        for (const auto& it : items) {
          if (it.size() < 2 || it.front() != '"' || it.back() != '"')
            throw Error(ErrorCode::ConfigInvalid,
                        origin + ":" + std::to_string(lineno) + ": bad string array item");
          v.strs.push_back(it.substr(1, it.size() - 2));
        }
      } else {
        v.kind = Value::Kind::NumberArray;
        for (const auto& it : items) {
          double d;
          if (!parse_number(it, d))
            throw Error(ErrorCode::ConfigInvalid,
                        origin + ":" + std::to_string(lineno) + ": bad number '" + it + "'");
          v.nums.push_back(d);
        }
      }
    } else {
      double d;
      if (!parse_number(val, d))
        throw Error(ErrorCode::ConfigInvalid,
                    origin + ":" + std::to_string(lineno) + ": bad value '" + val + "'");
      v.kind = Value::Kind::Number;
      v.num = d;
    }
    t.values_[key] = std::move(v);
  }
  return t;
}

const TomlTable::Value& TomlTable::require(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) fail("missing key '" + key + "'");
  return it->second;
}

void TomlTable::fail(const std::string& msg) const {
  throw Error(ErrorCode::ConfigInvalid, origin_ + ": " + msg);
}

std::string TomlTable::get_string(const std::string& key) const {
  const Value& v = require(key);
  if (v.kind != Value::Kind::String) fail("key '" + key + "' is not a string");
  return v.str;
}

std::string TomlTable::get_string_or(const std::string& key,
                                     const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double TomlTable::get_number(const std::string& key) const {
  const Value& v = require(key);
  if (v.kind != Value::Kind::Number) fail("key '" + key + "' is not a number");
  return v.num;
}

double TomlTable::get_number_or(const std::string& key, double fallback) const {
  return has(key) ? get_number(key) : fallback;
}

long TomlTable::get_int(const std::string& key) const {
  const double d = get_number(key);
  const long l = static_cast<long>(d);
  if (static_cast<double>(l) != d) fail("key '" + key + "' is not an integer");
  return l;
}

long TomlTable::get_int_or(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool TomlTable::get_bool_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const Value& v = require(key);
  if (v.kind != Value::Kind::Bool) fail("key '" + key + "' is not a bool");
  return v.flag;
}

std::vector<double> TomlTable::get_numbers(const std::string& key) const {
  const Value& v = require(key);
  if (v.kind == Value::Kind::Number) return {v.num};
  if (v.kind != Value::Kind::NumberArray) fail("key '" + key + "' is not a number array");
  return v.nums;
}

std::vector<double> TomlTable::get_numbers_or(const std::string& key,
                                              const std::vector<double>& fallback) const {
  return has(key) ? get_numbers(key) : fallback;
}

std::vector<std::string> TomlTable::get_strings(const std::string& key) const {
  const Value& v = require(key);
  if (v.kind == Value::Kind::String) return {v.str};
  if (v.kind != Value::Kind::StringArray) fail("key '" + key + "' is not a string array");
  return v.strs;
}

std::vector<std::string> TomlTable::keys_with_prefix(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_)
    if (k.rfind(prefix, 0) == 0) out.push_back(k);
  return out;
}

}  // namespace rigidflow
