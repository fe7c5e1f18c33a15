#pragma once

// Sectioned key=value configuration text.
//
//   # comment            (also ';')
//   [section]
//   key = value          (whitespace around key and value is ignored)
//
// Keys before the first section header belong to the unnamed section "".
// Duplicate keys within a section are an error. Values are kept as text and
// converted on access.

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tsmpc/core/types.hpp"

namespace tsmpc::config {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError(what + ": empty value");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
    throw ConfigError(what + ": not a finite number: '" + t + "'");
  }
  return v;
}

inline long long parse_int(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) {
    throw ConfigError(what + ": not an integer: '" + t + "'");
  }
  return v;
}

/// Comma-separated list of finite numbers. Empty items are rejected with their 1-based position.
inline std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::size_t start = 0;
  int position = 1;
  while (true) {
    const auto comma = text.find(',', start);
    const std::string item = trim(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (item.empty()) {
      throw ConfigError(what + ": empty list item at position " + std::to_string(position));
    }
    out.push_back(parse_double(item, what + " item " + std::to_string(position)));
    if (comma == std::string::npos) break;
    start = comma + 1;
    ++position;
  }
  return out;
}

class Section {
 public:
  Section() = default;
  explicit Section(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& entries() const { return values_; }

  /// Throws if any key is not in `allowed`, naming the key and the allowed set.
  void require_known(const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : values_) {
      if (!allowed.count(k)) {
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        throw ConfigError("unknown key '" + k + "' in section [" + name_ + "]; allowed keys: " + list);
      }
    }
  }

  double get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_double(it->second, qualified(key));
  }
  long long get_int(const std::string& key, long long fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_int(it->second, qualified(key));
  }
  std::string get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : trim(it->second);
  }
  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_double_list(it->second, qualified(key));
  }
  /// String restricted to `choices`; an error lists the allowed values.
  std::string get_choice(const std::string& key, const std::string& fallback,
                         const std::vector<std::string>& choices) const {
    const std::string v = get_string(key, fallback);
    if (std::find(choices.begin(), choices.end(), v) == choices.end()) {
      std::string list;
      for (const auto& c : choices) list += (list.empty() ? "" : "|") + c;
      throw ConfigError(qualified(key) + ": invalid value '" + v + "'; allowed values: " + list);
    }
    return v;
  }

 private:
  std::string qualified(const std::string& key) const {
    return name_.empty() ? key : name_ + "." + key;
  }

  std::string name_;
  std::map<std::string, std::string> values_;
};

class Document {
 public:
  /// Missing sections read as empty.
  const Section& section(const std::string& name) const {
    static const Section empty;
    auto it = sections_.find(name);
    return it == sections_.end() ? empty : it->second;
  }
  Section& mutable_section(const std::string& name) {
    auto it = sections_.find(name);
    if (it == sections_.end()) it = sections_.emplace(name, Section(name)).first;
    return it->second;
  }
  std::vector<std::string> section_names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : sections_) out.push_back(k);
    return out;
  }

  void require_known_sections(const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : sections_) {
      if (v.entries().empty()) continue;
      if (!allowed.count(k)) {
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + ("[" + a + "]");
        throw ConfigError("unknown section [" + k + "]; allowed sections: " + list);
      }
    }
  }

 private:
  std::map<std::string, Section> sections_;
};

inline Document parse(std::istream& in) {
  Document doc;
  std::string current;
  doc.mutable_section(current);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      current = trim(t.substr(1, t.size() - 2));
      doc.mutable_section(current);
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    Section& s = doc.mutable_section(current);
    if (s.has(key)) {
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    s.set(key, trim(t.substr(eq + 1)));
  }
  return doc;
}

inline Document parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

inline Document parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in);
}

}  // namespace tsmpc::config
