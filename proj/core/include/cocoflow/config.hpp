#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cocoflow/types.hpp"

namespace cocoflow {

/// One parsed value: number, boolean, quoted string, or (possibly nested)
/// bracketed array. Matrices are arrays of equally long numeric arrays,
/// row-major.
class ConfigValue {
 public:
  enum class Type { number, boolean, string, array };

  static ConfigValue number(double v);
  static ConfigValue boolean(bool v);
  static ConfigValue string(std::string v);
  static ConfigValue array(std::vector<ConfigValue> items);

  Type type() const { return type_; }
  double as_number() const;
  bool as_boolean() const;
  const std::string& as_string() const;
  const std::vector<ConfigValue>& items() const;
  Vector as_vector() const;
  Matrix as_matrix() const;

 private:
  Type type_ = Type::number;
  double number_ = 0.0;
  bool boolean_ = false;
  std::string string_;
  std::vector<ConfigValue> items_;
};

/// Flat-section key-value file (TOML-compatible subset): [section] headers,
/// key = value lines, '#' comments.
class ConfigFile {
 public:
  static ConfigFile parse(const std::string& text);
  static ConfigFile parse_file(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  const ConfigValue& get(const std::string& section, const std::string& key) const;

  double get_number(const std::string& section, const std::string& key) const;
  double get_number_or(const std::string& section, const std::string& key, double fallback) const;
  bool get_boolean_or(const std::string& section, const std::string& key, bool fallback) const;
  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const;
  Vector get_vector(const std::string& section, const std::string& key) const;
  Matrix get_matrix(const std::string& section, const std::string& key) const;

  bool has_section(const std::string& section) const;

  /// Applies "section.key=value" with a raw value literal; used by --sweep
  /// and ad-hoc command line overrides.
  void set_override(const std::string& dotted_key, const std::string& literal);

 private:
  std::map<std::string, std::map<std::string, ConfigValue>> sections_;
};

}  // namespace cocoflow
