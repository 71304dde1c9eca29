// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "astoi/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "astoi/errors.hpp"

namespace astoi {

namespace {

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

FormatError Malformed(const std::string& msg) { return FormatError(FormatError::Kind::kMalformed, msg); }

}  // namespace

KeyValues ParseKeyValues(const std::string& text, const std::string& source) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    const std::string where = source + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw Malformed(where + ": expected 'key = value'");
    const std::string key = Trim(t.substr(0, eq));
    if (key.empty()) throw Malformed(where + ": empty key");
    if (!kv.emplace(key, Trim(t.substr(eq + 1))).second) throw Malformed(where + ": duplicate key '" + key + "'");
  }
  return kv;
}

KeyValues ReadKeyValueFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return ParseKeyValues(text.str(), path.string());
}

void WriteKeyValueFile(const KeyValues& values, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  for (const auto& [k, v] : values) out << k << " = " << v << '\n';
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string GetString(const KeyValues& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw Malformed("missing key '" + key + "'");
  return it->second;
}

long GetInt(const KeyValues& kv, const std::string& key) {
  const std::string s = GetString(kv, key);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw Malformed("key '" + key + "' is not an integer");
  return v;
}

double GetDouble(const KeyValues& kv, const std::string& key) {
  const std::string s = GetString(kv, key);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw Malformed("key '" + key + "' is not a number");
  return v;
}

}  // namespace astoi
