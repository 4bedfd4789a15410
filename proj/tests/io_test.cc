// Copyright 2026 The Capeval Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "capeval/io.h"

#include <filesystem>

#include <gtest/gtest.h>

#include "capeval/errors.h"
#include "test_support.h"

namespace capeval {
namespace {

TEST(IoTest, AtomicWriteRoundTrip) {
  testing::TempDir dir("io");
  const auto path = dir.path() / "nested" / "out.txt";
  WriteFileAtomic(path, "hello\n");
  EXPECT_EQ(ReadFile(path), "hello\n");
  WriteFileAtomic(path, "second");
  EXPECT_EQ(ReadFile(path), "second");
  EXPECT_FALSE(std::filesystem::exists(path.string() + ".tmp"));
}

TEST(IoTest, MissingFileIsIoError) {
  try {
    ReadFile("/nonexistent/capeval/file.txt");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_EQ(e.exit_code(), 2);
  }
}

TEST(IoTest, SafeFileName) {
  EXPECT_EQ(SafeFileName("negation_v2"), "negation_v2");
  EXPECT_EQ(SafeFileName("a/b c"), "a_b_c");
}

TEST(CsvTest, QuotesOnlyWhenNeeded) {
  EXPECT_EQ(CsvRow({"a", "b"}), "a,b\n");
  EXPECT_EQ(CsvRow({"x,y", "say \"hi\""}), "\"x,y\",\"say \"\"hi\"\"\"\n");
}

TEST(CsvTest, ParseRoundTrip) {
  const std::vector<std::vector<std::string>> rows = {
      {"name", "value"}, {"comma, inside", "1"}, {"quote\"d", ""}, {"line\nbreak", "2"}};
  std::string text;
  for (const auto& r : rows) text += CsvRow(r);
  EXPECT_EQ(ParseCsv(text), rows);
}

TEST(CsvTest, UnterminatedQuoteRejected) {
  EXPECT_THROW(ParseCsv("\"open,1\n"), ValidationError);
}

}  // namespace
}  // namespace capeval
