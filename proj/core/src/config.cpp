#include "cocoflow/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace cocoflow {

ConfigValue ConfigValue::number(double v) {
  ConfigValue value;
  value.type_ = Type::number;
  value.number_ = v;
  return value;
}

ConfigValue ConfigValue::boolean(bool v) {
  ConfigValue value;
  value.type_ = Type::boolean;
  value.boolean_ = v;
  return value;
}

ConfigValue ConfigValue::string(std::string v) {
  ConfigValue value;
  value.type_ = Type::string;
  value.string_ = std::move(v);
  return value;
}

ConfigValue ConfigValue::array(std::vector<ConfigValue> items) {
  ConfigValue value;
  value.type_ = Type::array;
  value.items_ = std::move(items);
  return value;
}

double ConfigValue::as_number() const {
  if (type_ != Type::number) throw ConfigError("config value is not a number");
  return number_;
}

bool ConfigValue::as_boolean() const {
  if (type_ != Type::boolean) throw ConfigError("config value is not a boolean");
  return boolean_;
}

const std::string& ConfigValue::as_string() const {
  if (type_ != Type::string) throw ConfigError("config value is not a string");
  return string_;
}

const std::vector<ConfigValue>& ConfigValue::items() const {
  if (type_ != Type::array) throw ConfigError("config value is not an array");
  return items_;
}

Vector ConfigValue::as_vector() const {
  const auto& elems = items();
  Vector v(static_cast<Eigen::Index>(elems.size()));
  for (std::size_t i = 0; i < elems.size(); ++i) v[static_cast<Eigen::Index>(i)] = elems[i].as_number();
  return v;
}

Matrix ConfigValue::as_matrix() const {
  const auto& rows = items();
  if (rows.empty()) throw ConfigError("matrix literal has no rows");
  const std::size_t cols = rows.front().items().size();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r].items();
    if (row.size() != cols) throw ConfigError("matrix literal rows have uneven length");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].as_number();
  }
  return m;
}

namespace {

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  void skip_ws() {
    while (!done() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }
};

ConfigValue parse_value(Cursor& cur);

ConfigValue parse_array(Cursor& cur) {
  ++cur.pos;  // consume '['
  std::vector<ConfigValue> items;
  cur.skip_ws();
  if (!cur.done() && cur.peek() == ']') {
    ++cur.pos;
    return ConfigValue::array(std::move(items));
  }
  while (true) {
    items.push_back(parse_value(cur));
    cur.skip_ws();
    if (cur.done()) throw ConfigError("unterminated array literal");
    if (cur.peek() == ',') {
      ++cur.pos;
      cur.skip_ws();
      continue;
    }
    if (cur.peek() == ']') {
      ++cur.pos;
      return ConfigValue::array(std::move(items));
    }
    throw ConfigError("expected ',' or ']' in array literal");
  }
}

ConfigValue parse_value(Cursor& cur) {
  cur.skip_ws();
  if (cur.done()) throw ConfigError("missing value");
  const char c = cur.peek();
  if (c == '[') return parse_array(cur);
  if (c == '"') {
    ++cur.pos;
    std::string out;
    while (!cur.done() && cur.peek() != '"') out.push_back(cur.text[cur.pos++]);
    if (cur.done()) throw ConfigError("unterminated string literal");
    ++cur.pos;
    return ConfigValue::string(std::move(out));
  }
  // Bare token: boolean or number.
  std::size_t start = cur.pos;
  while (!cur.done() && cur.peek() != ',' && cur.peek() != ']' && cur.peek() != '#' &&
         cur.peek() != ' ' && cur.peek() != '\t')
    ++cur.pos;
  const std::string token = cur.text.substr(start, cur.pos - start);
  if (token == "true") return ConfigValue::boolean(true);
  if (token == "false") return ConfigValue::boolean(false);
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return ConfigValue::number(v);
  } catch (const std::exception&) {
    throw ConfigError("malformed value token '" + token + "'");
  }
}

std::string strip(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Removes a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
  ConfigFile cfg;
  std::istringstream stream(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    const std::string line = strip(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      section = strip(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("line " + std::to_string(line_no) + ": empty section name");
      cfg.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = strip(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    const std::string value_text = strip(line.substr(eq + 1));
    Cursor cur{value_text, 0};
    ConfigValue value = parse_value(cur);
    cur.skip_ws();
    if (!cur.done())
      throw ConfigError("line " + std::to_string(line_no) + ": trailing characters after value");
    cfg.sections_[section][key] = std::move(value);
  }
  return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  const auto sec = sections_.find(section);
  return sec != sections_.end() && sec->second.count(key) > 0;
}

bool ConfigFile::has_section(const std::string& section) const {
  return sections_.count(section) > 0;
}

const ConfigValue& ConfigFile::get(const std::string& section, const std::string& key) const {
  const auto sec = sections_.find(section);
  if (sec == sections_.end()) throw ConfigError("missing config section [" + section + "]");
  const auto it = sec->second.find(key);
  if (it == sec->second.end())
    throw ConfigError("missing config key " + section + "." + key);
  return it->second;
}

double ConfigFile::get_number(const std::string& section, const std::string& key) const {
  return get(section, key).as_number();
}

double ConfigFile::get_number_or(const std::string& section, const std::string& key,
                                 double fallback) const {
  return has(section, key) ? get_number(section, key) : fallback;
}

bool ConfigFile::get_boolean_or(const std::string& section, const std::string& key,
                                bool fallback) const {
  return has(section, key) ? get(section, key).as_boolean() : fallback;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key) const {
  return get(section, key).as_string();
}

std::string ConfigFile::get_string_or(const std::string& section, const std::string& key,
                                      const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

Vector ConfigFile::get_vector(const std::string& section, const std::string& key) const {
  return get(section, key).as_vector();
}

Matrix ConfigFile::get_matrix(const std::string& section, const std::string& key) const {
  return get(section, key).as_matrix();
}

void ConfigFile::set_override(const std::string& dotted_key, const std::string& literal) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == dotted_key.size())
    throw ConfigError("override key must have the form section.key: " + dotted_key);
  const std::string section = dotted_key.substr(0, dot);
  const std::string key = dotted_key.substr(dot + 1);
  const std::string value_text = strip(literal);
  Cursor cur{value_text, 0};
  ConfigValue value = parse_value(cur);
  cur.skip_ws();
  if (!cur.done()) throw ConfigError("trailing characters in override value: " + literal);
  sections_[section][key] = std::move(value);
}

}  // namespace cocoflow
