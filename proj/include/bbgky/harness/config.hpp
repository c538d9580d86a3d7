#pragma once

// INI experiment configs. Parsing is done by Boost.PropertyTree; a second pass
// over the text records the line of every key so field errors can point at it.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bbgky/error.hpp"

namespace bbgky::harness {

/// Malformed or invalid configuration; carries the source, line (0 if unknown) and field.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& source, int line, const std::string& field, const std::string& message)
      : Error(format(source, line, field, message)), source_(source), field_(field), line_(line) {}

  const std::string& source() const { return source_; }
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& source, int line, const std::string& field, const std::string& message) {
    std::string out = source;
    if (line > 0) out += ":" + std::to_string(line);
    out += ": ";
    if (!field.empty()) out += "[" + field + "] ";
    return out + message;
  }

  std::string source_;
  std::string field_;
  int line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Flat view of an INI file: keys are addressed as "section.key".
class IniDocument {
 public:
  static IniDocument parse(const std::string& text, const std::string& source = "<config>") {
    IniDocument doc;
    doc.source_ = source;
    doc.text_ = text;
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
      boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ConfigError(source, static_cast<int>(e.line()), "", e.message());
    }
    doc.index_lines();
    for (const auto& [section, child] : tree) {
      if (!doc.sections_.count(section))
        throw ConfigError(source, doc.line_of(section), section, "key outside of any section");
      for (const auto& [key, value] : child) doc.values_[section + "." + key] = value.data();
    }
    return doc;
  }

  static IniDocument load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string(), 0, "", "cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    auto doc = parse(ss.str(), path.string());
    doc.base_dir_ = path.parent_path();
    return doc;
  }

  const std::string& source() const { return source_; }
  const std::string& text() const { return text_; }
  const std::filesystem::path& base_dir() const { return base_dir_; }

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  int line_of(const std::string& key) const {
    const auto it = lines_.find(key);
    return it == lines_.end() ? 0 : it->second;
  }

  ConfigError error(const std::string& key, const std::string& message) const {
    return {source_, line_of(key), key, message};
  }

  std::string get_string(const std::string& key, const std::optional<std::string>& fallback = std::nullopt) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
      if (!fallback) throw error(key, "required key is missing");
      return *fallback;
    }
    used_.insert(key);
    return std::string(detail::trim(it->second));
  }

  double get_double(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    if (!has(key)) {
      if (!fallback) throw error(key, "required key is missing");
      return *fallback;
    }
    return to_double(key, get_string(key));
  }

  long get_int(const std::string& key, std::optional<long> fallback = std::nullopt) const {
    if (!has(key)) {
      if (!fallback) throw error(key, "required key is missing");
      return *fallback;
    }
    const auto text = get_string(key);
    long v = 0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size()) throw error(key, "expected an integer, got '" + text + "'");
    return v;
  }

  bool get_bool(const std::string& key, std::optional<bool> fallback = std::nullopt) const {
    if (!has(key)) {
      if (!fallback) throw error(key, "required key is missing");
      return *fallback;
    }
    const auto text = get_string(key);
    if (text == "true" || text == "yes" || text == "1") return true;
    if (text == "false" || text == "no" || text == "0") return false;
    throw error(key, "expected true or false, got '" + text + "'");
  }

  /// Comma separated numbers.
  std::vector<double> get_list(const std::string& key, std::optional<std::vector<double>> fallback = std::nullopt) const {
    if (!has(key)) {
      if (!fallback) throw error(key, "required key is missing");
      return *fallback;
    }
    const auto text = get_string(key);
    std::vector<double> out;
    std::string_view rest(text);
    while (true) {
      const auto comma = rest.find(',');
      const auto item = detail::trim(rest.substr(0, comma));
      if (item.empty()) throw error(key, "empty entry in list '" + text + "'");
      out.push_back(to_double(key, std::string(item)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return out;
  }

  /// Throws on the first key that no accessor has read (typically a typo).
  void reject_unused() const {
    const std::string* first = nullptr;
    for (const auto& [key, value] : values_)
      if (!used_.count(key) && (!first || line_of(key) < line_of(*first))) first = &key;
    if (first) throw error(*first, "unknown key");
  }

 private:
  double to_double(const std::string& key, const std::string& text) const {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size()) throw error(key, "expected a number, got '" + text + "'");
    return v;
  }

  void index_lines() {
    std::istringstream in(text_);
    std::string line;
    std::string section;
    int n = 0;
    while (std::getline(in, line)) {
      ++n;
      const auto t = detail::trim(line);
      if (t.empty() || t.front() == ';' || t.front() == '#') continue;
      if (t.front() == '[') {
        section = std::string(detail::trim(t.substr(1, t.find(']') - 1)));
        lines_.emplace(section, n);
        sections_.insert(section);
        continue;
      }
      const auto key = std::string(detail::trim(t.substr(0, t.find('='))));
      lines_.emplace(section.empty() ? key : section + "." + key, n);
    }
  }

  std::string source_;
  std::string text_;
  std::filesystem::path base_dir_;
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
  std::set<std::string> sections_;
  mutable std::set<std::string> used_;
};

}  // namespace bbgky::harness
