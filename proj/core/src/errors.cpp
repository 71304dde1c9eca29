// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "astoi/errors.hpp"

#include <atomic>
#include <iostream>

namespace astoi {

namespace {
std::atomic<bool> g_warnings_enabled{true};
}  // namespace

void Warn(const std::string& msg) {
  if (g_warnings_enabled.load(std::memory_order_relaxed)) {
    std::cerr << "warning: " << msg << '\n';
  }
}

void SetWarningsEnabled(bool enabled) { g_warnings_enabled.store(enabled); }

}  // namespace astoi
