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

#ifndef CAPEVAL_TESTS_TEST_SUPPORT_H_
#define CAPEVAL_TESTS_TEST_SUPPORT_H_

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "capeval/corpus.h"

namespace capeval::testing {

inline Example MakeExample(std::string id, std::string text, Label label,
                           std::string domain = "src",
                           std::string split = "validation") {
  Example e;
  e.id = std::move(id);
  e.text = std::move(text);
  e.label = label;
  e.domain = std::move(domain);
  e.split = std::move(split);
  return e;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("capeval_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace capeval::testing

#endif  // CAPEVAL_TESTS_TEST_SUPPORT_H_
