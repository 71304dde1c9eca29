// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include "astoi/pipeline.hpp"

namespace astoi {
namespace {

std::vector<std::string> Lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST(RenderTables, CsvSortedWithTwoDecimals) {
  const std::vector<EvalRow> rows{
      {"ssn", 5, 0.7049, 0.8251, 0.7049, 0.8251},
      {"babble", 0, 0.5, 0.6, 0.5, 0.6},
      {"ssn", -5, 0.33333, 0.66666, 0.3, 0.6},
  };
  const auto lines = Lines(RenderTables(rows, TableFormat::kCsv));
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "noise_type,snr_db,elc_unprocessed,elc_enhanced,stoi_unprocessed,stoi_enhanced");
  EXPECT_EQ(lines[1], "babble,0,0.50,0.60,0.50,0.60");
  EXPECT_EQ(lines[2], "ssn,-5,0.33,0.67,0.30,0.60");
  EXPECT_EQ(lines[3], "ssn,5,0.70,0.83,0.70,0.83");
}

TEST(RenderTables, TextHasBothTables) {
  const std::vector<EvalRow> rows{{"ssn", 2.5, 0.1, 0.2, 0.3, 0.4}};
  const std::string text = RenderTables(rows, TableFormat::kText);
  const auto lines = Lines(text);
  ASSERT_EQ(lines.size(), 7u);
  EXPECT_EQ(lines[0], "ELC");
  EXPECT_NE(lines[1].find("unprocessed"), std::string::npos);
  EXPECT_NE(lines[2].find("0.10"), std::string::npos);
  EXPECT_NE(lines[2].find("0.20"), std::string::npos);
  EXPECT_NE(lines[2].find("2.5"), std::string::npos);
  EXPECT_EQ(lines[4], "STOI (approximate)");
  EXPECT_NE(lines[6].find("0.30"), std::string::npos);
  EXPECT_NE(lines[6].find("0.40"), std::string::npos);
}

TEST(RenderTables, EmptyGivesHeadersOnly) {
  EXPECT_EQ(Lines(RenderTables({}, TableFormat::kCsv)).size(), 1u);
  EXPECT_EQ(Lines(RenderTables({}, TableFormat::kText)).size(), 5u);
}

TEST(RenderTables, StableForEqualKeys) {
  const std::vector<EvalRow> rows{{"a", 0, 0.11, 0, 0, 0}, {"a", 0, 0.22, 0, 0, 0}};
  const auto lines = Lines(RenderTables(rows, TableFormat::kCsv));
  EXPECT_EQ(lines[1].substr(0, 9), "a,0,0.11,");
  EXPECT_EQ(lines[2].substr(0, 9), "a,0,0.22,");
}

}  // namespace
}  // namespace astoi
