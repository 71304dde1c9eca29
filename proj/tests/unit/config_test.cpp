// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "astoi/config.hpp"

#include <gtest/gtest.h>

#include <fstream>

#include "astoi/errors.hpp"
#include "temp_dir.hpp"

namespace astoi {
namespace {

using testing::TempDir;

FormatError::Kind ParseKind(const std::string& text) {
  try {
    ParseKeyValues(text);
  } catch (const FormatError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "accepted: " << text;
  return FormatError::Kind::kChecksum;
}

TEST(ParseKeyValues, TrimsAndSkipsComments) {
  const KeyValues kv = ParseKeyValues("# comment\n\n  hidden = 64,64 \nlearning_rate=0.01\r\n  \t\nname = a = b\n");
  ASSERT_EQ(kv.size(), 3u);
  EXPECT_EQ(kv.at("hidden"), "64,64");
  EXPECT_EQ(kv.at("learning_rate"), "0.01");
  EXPECT_EQ(kv.at("name"), "a = b");
}

TEST(ParseKeyValues, RejectsMalformedLines) {
  EXPECT_EQ(ParseKind("just text\n"), FormatError::Kind::kMalformed);
  EXPECT_EQ(ParseKind(" = 3\n"), FormatError::Kind::kMalformed);
  EXPECT_EQ(ParseKind("a = 1\na = 2\n"), FormatError::Kind::kMalformed);
}

TEST(TypedLookups, ParseOrThrow) {
  const KeyValues kv = ParseKeyValues("i = 42\nd = -1.5e-3\ns = text\nbad = 4x\n");
  EXPECT_EQ(GetInt(kv, "i"), 42);
  EXPECT_DOUBLE_EQ(GetDouble(kv, "d"), -1.5e-3);
  EXPECT_DOUBLE_EQ(GetDouble(kv, "i"), 42.0);
  EXPECT_EQ(GetString(kv, "s"), "text");
  EXPECT_THROW(GetInt(kv, "bad"), FormatError);
  EXPECT_THROW(GetDouble(kv, "bad"), FormatError);
  EXPECT_THROW(GetInt(kv, "d"), FormatError);
  EXPECT_THROW(GetString(kv, "missing"), FormatError);
}

TEST(KeyValueFile, RoundTrip) {
  TempDir dir("config");
  const KeyValues kv{{"alpha", "1"}, {"beta", "two words"}};
  WriteKeyValueFile(kv, dir / "a.cfg");
  EXPECT_EQ(ReadKeyValueFile(dir / "a.cfg"), kv);
  EXPECT_THROW(ReadKeyValueFile(dir / "missing.cfg"), IoError);
  EXPECT_THROW(WriteKeyValueFile(kv, dir / "no/such/dir/a.cfg"), IoError);
}

}  // namespace
}  // namespace astoi
