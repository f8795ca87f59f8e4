#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace ponder::toml {

/// Minimal TOML subset: [tables], key = value with strings, numbers,
/// booleans, and flat homogeneous arrays. Comments with '#'. Enough for the
/// configuration schema; nested tables and datetimes are not supported.
struct Value {
  std::variant<std::string, double, bool, std::vector<double>, std::vector<std::string>> v;

  bool is_string() const { return std::holds_alternative<std::string>(v); }
  bool is_number() const { return std::holds_alternative<double>(v); }
  bool is_bool() const { return std::holds_alternative<bool>(v); }
  bool is_number_array() const { return std::holds_alternative<std::vector<double>>(v); }
};

using Table = std::map<std::string, Value>;

struct Document {
  Table root;
  std::map<std::string, Table> tables;

  bool has_table(const std::string& name) const { return tables.count(name) > 0; }
  const Table& table(const std::string& name) const;
};

/// Parse a file; throws std::invalid_argument with line numbers on errors.
Document parse_file(const std::string& path);
Document parse_string(const std::string& text, const std::string& origin = "<string>");

// Typed lookups; `where` prefixes error messages with the key path.
double get_number(const Table& t, const std::string& key, const std::string& where);
double get_number_or(const Table& t, const std::string& key, double fallback);
std::string get_string(const Table& t, const std::string& key, const std::string& where);
std::string get_string_or(const Table& t, const std::string& key, const std::string& fallback);
bool get_bool_or(const Table& t, const std::string& key, bool fallback);
std::vector<double> get_array(const Table& t, const std::string& key, const std::string& where);

}  // namespace ponder::toml
