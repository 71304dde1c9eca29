// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ASTOI_CONFIG_HPP_
#define ASTOI_CONFIG_HPP_

#include <filesystem>
#include <map>
#include <string>

namespace astoi {

using KeyValues = std::map<std::string, std::string>;

/// Parses flat "key = value" text. Blank lines and lines starting with '#'
/// are ignored; anything else without '=' or with a repeated key is a
/// FormatError(kMalformed).
KeyValues ParseKeyValues(const std::string& text, const std::string& source = "config");
KeyValues ReadKeyValueFile(const std::filesystem::path& path);
void WriteKeyValueFile(const KeyValues& values, const std::filesystem::path& path);

/// Typed lookups; a missing key or an unparsable value is a FormatError.
std::string GetString(const KeyValues& kv, const std::string& key);
long GetInt(const KeyValues& kv, const std::string& key);
double GetDouble(const KeyValues& kv, const std::string& key);

}  // namespace astoi

#endif  // ASTOI_CONFIG_HPP_
