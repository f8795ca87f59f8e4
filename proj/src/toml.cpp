#include "ponder/toml.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ponder::toml {

namespace {

std::string trim(const std::string& s) {
  const size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw std::invalid_argument(origin + ":" + std::to_string(line) + ": " + msg);
}

// Strip a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

Value parse_scalar(const std::string& raw, const std::string& origin, int line) {
  const std::string s = trim(raw);
  if (s.empty()) fail(origin, line, "empty value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') fail(origin, line, "unterminated string");
    return Value{s.substr(1, s.size() - 2)};
  }
  if (s == "true") return Value{true};
  if (s == "false") return Value{false};
  try {
    size_t pos = 0;
    const double d = std::stod(s, &pos);
    if (pos != s.size()) fail(origin, line, "trailing characters after number: '" + s + "'");
    return Value{d};
  } catch (const std::invalid_argument&) {
    fail(origin, line, "cannot parse value: '" + s + "'");
  } catch (const std::out_of_range&) {
    fail(origin, line, "number out of range: '" + s + "'");
  }
}

Value parse_value(const std::string& raw, const std::string& origin, int line) {
  const std::string s = trim(raw);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') fail(origin, line, "unterminated array");
    const std::string inner = s.substr(1, s.size() - 2);
    std::vector<std::string> items;
    std::string cur;
    bool in_str = false;
    for (char c : inner) {
      if (c == '"') in_str = !in_str;
      if (c == ',' && !in_str) {
        items.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!trim(cur).empty()) items.push_back(cur);
    std::vector<double> nums;
    std::vector<std::string> strs;
    for (const std::string& item : items) {
      const Value v = parse_scalar(item, origin, line);
      if (v.is_number() && strs.empty()) {
        nums.push_back(std::get<double>(v.v));
      } else if (v.is_string() && nums.empty()) {
        strs.push_back(std::get<std::string>(v.v));
      } else {
        fail(origin, line, "arrays must be homogeneous numbers or strings");
      }
    }
    if (!strs.empty()) return Value{strs};
    return Value{nums};
  }
  return parse_scalar(s, origin, line);
}

}  // namespace

const Table& Document::table(const std::string& name) const {
  const auto it = tables.find(name);
  if (it == tables.end()) throw std::invalid_argument("missing [" + name + "] table");
  return it->second;
}

Document parse_string(const std::string& text, const std::string& origin) {
  Document doc;
  Table* current = &doc.root;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(strip_comment(line));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(origin, lineno, "unterminated table header");
      const std::string name = trim(s.substr(1, s.size() - 2));
      if (name.empty()) fail(origin, lineno, "empty table name");
      current = &doc.tables[name];
      continue;
    }
    const size_t eq = s.find('=');
    if (eq == std::string::npos) fail(origin, lineno, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) fail(origin, lineno, "empty key");
    if (current->count(key)) fail(origin, lineno, "duplicate key: " + key);
    (*current)[key] = parse_value(s.substr(eq + 1), origin, lineno);
  }
  return doc;
}

Document parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), path);
}

double get_number(const Table& t, const std::string& key, const std::string& where) {
  const auto it = t.find(key);
  if (it == t.end()) throw std::invalid_argument(where + "." + key + " is required");
  if (!it->second.is_number())
    throw std::invalid_argument(where + "." + key + " must be a number");
  return std::get<double>(it->second.v);
}

double get_number_or(const Table& t, const std::string& key, double fallback) {
  const auto it = t.find(key);
  if (it == t.end()) return fallback;
  if (!it->second.is_number()) throw std::invalid_argument(key + " must be a number");
  return std::get<double>(it->second.v);
}

std::string get_string(const Table& t, const std::string& key, const std::string& where) {
  const auto it = t.find(key);
  if (it == t.end()) throw std::invalid_argument(where + "." + key + " is required");
  if (!it->second.is_string())
    throw std::invalid_argument(where + "." + key + " must be a string");
  return std::get<std::string>(it->second.v);
}

std::string get_string_or(const Table& t, const std::string& key, const std::string& fallback) {
  const auto it = t.find(key);
  if (it == t.end()) return fallback;
  if (!it->second.is_string()) throw std::invalid_argument(key + " must be a string");
  return std::get<std::string>(it->second.v);
}

bool get_bool_or(const Table& t, const std::string& key, bool fallback) {
  const auto it = t.find(key);
  if (it == t.end()) return fallback;
  if (!it->second.is_bool()) throw std::invalid_argument(key + " must be a boolean");
  return std::get<bool>(it->second.v);
}

std::vector<double> get_array(const Table& t, const std::string& key, const std::string& where) {
  const auto it = t.find(key);
  if (it == t.end()) throw std::invalid_argument(where + "." + key + " is required");
  if (!it->second.is_number_array())
    throw std::invalid_argument(where + "." + key + " must be a number array");
  return std::get<std::vector<double>>(it->second.v);
}

}  // namespace ponder::toml
