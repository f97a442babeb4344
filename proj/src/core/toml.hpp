#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace rigidflow {

// Small TOML reader covering the subset used by scenario and plan files:
// [section] headers (dotted allowed), key = string | number | bool |
// array of numbers or strings, and # comments.
class TomlTable {
 public:
  static TomlTable parse_file(const std::string& path);
  static TomlTable parse(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key) const;
  std::string get_string_or(const std::string& key, const std::string& fallback) const;
  double get_number(const std::string& key) const;
  double get_number_or(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int_or(const std::string& key, long fallback) const;
  bool get_bool_or(const std::string& key, bool fallback) const;
  std::vector<double> get_numbers(const std::string& key) const;
  std::vector<double> get_numbers_or(const std::string& key,
                                     const std::vector<double>& fallback) const;
  std::vector<std::string> get_strings(const std::string& key) const;

  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;
  const std::string& origin() const { return origin_; }

 private:
  struct Value {
    enum class Kind { String, Number, Bool, NumberArray, StringArray } kind;
    std::string str;
    double num = 0.0;
    bool flag = false;
    std::vector<double> nums;
    std::vector<std::string> strs;
  };

  const Value& require(const std::string& key) const;
  [[noreturn]] void fail(const std::string& msg) const;

  std::map<std::string, Value> values_;
  std::string origin_;
};

}  // namespace rigidflow
