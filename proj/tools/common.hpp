// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ASTOI_TOOLS_COMMON_HPP_
#define ASTOI_TOOLS_COMMON_HPP_

#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "astoi/config.hpp"
#include "astoi/signal.hpp"

namespace astoi::tools {

enum ExitCode { kOk = 0, kUsage = 1, kDataError = 2, kNumericFailure = 3 };

/// Bad command-line input or configuration (exit code 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads a config file and rejects keys outside `allowed`.
KeyValues ReadConfig(const std::filesystem::path& path, const std::set<std::string>& allowed);

std::vector<double> ParseDoubleList(const std::string& text);
std::vector<int> ParseIntList(const std::string& text);

/// Reads a WAV file and brings it to the working rate.
TimeSignal ReadSpeech(const std::filesystem::path& path);
std::vector<TimeSignal> ReadSpeechList(const std::vector<std::filesystem::path>& paths);

/// Clean utterances of a test set plus its noise files (noise_<type>.wav).
struct TestSet {
  std::vector<TimeSignal> clean;
  std::vector<std::pair<std::string, TimeSignal>> noises;
};

/// Accepts either a test directory or a dataset directory with a test/
/// subdirectory.
TestSet LoadTestSet(const std::filesystem::path& dir);

void Info(const std::string& msg);

}  // namespace astoi::tools

#endif  // ASTOI_TOOLS_COMMON_HPP_
