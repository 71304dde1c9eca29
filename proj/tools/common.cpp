// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "common.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "astoi/dataset.hpp"
#include "astoi/errors.hpp"
#include "astoi/signal_io.hpp"

namespace astoi::tools {

KeyValues ReadConfig(const std::filesystem::path& path, const std::set<std::string>& allowed) {
  KeyValues kv;
  try {
    kv = ReadKeyValueFile(path);
  } catch (const FormatError& e) {
    throw UsageError(e.what());
  }
  for (const auto& [key, value] : kv) {
    if (!allowed.count(key)) throw UsageError(path.string() + ": unknown key '" + key + "'");
  }
  return kv;
}

std::vector<double> ParseDoubleList(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw UsageError("'" + text + "' is not a comma-separated list of numbers");
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::vector<int> ParseIntList(const std::string& text) {
  std::vector<int> out;
  for (double v : ParseDoubleList(text)) {
    if (v != static_cast<int>(v)) throw UsageError("'" + text + "' is not a list of integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

TimeSignal ReadSpeech(const std::filesystem::path& path) { return ToWorkingRate(ReadWav(path)); }

std::vector<TimeSignal> ReadSpeechList(const std::vector<std::filesystem::path>& paths) {
  std::vector<TimeSignal> out;
  out.reserve(paths.size());
  for (const auto& p : paths) out.push_back(ReadSpeech(p));
  return out;
}

TestSet LoadTestSet(const std::filesystem::path& dir) {
  std::filesystem::path root = dir;
  if (!std::filesystem::exists(root / "manifest.txt") && std::filesystem::exists(dir / "test" / "manifest.txt")) {
    root = dir / "test";
  }
  TestSet t;
  t.clean = ReadSpeechList(ReadManifest(root / "manifest.txt"));
  std::vector<std::filesystem::path> noise_files;
  for (const auto& entry : std::filesystem::directory_iterator(root)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("noise_", 0) == 0 && entry.path().extension() == ".wav") noise_files.push_back(entry.path());
  }
  std::sort(noise_files.begin(), noise_files.end());
  for (const auto& p : noise_files) {
    t.noises.emplace_back(p.stem().string().substr(6), ReadSpeech(p));
  }
  if (t.noises.empty()) throw IoError("no noise_<type>.wav files in '" + root.string() + "'");
  return t;
}

void Info(const std::string& msg) { std::fprintf(stderr, "%s\n", msg.c_str()); }

}  // namespace astoi::tools
