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

#ifndef CAPEVAL_IO_H_
#define CAPEVAL_IO_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace capeval {

// Reads a whole file. Throws IoError.
std::string ReadFile(const std::filesystem::path& path);

// Writes `content` to a temporary sibling file and renames it over `path`,
// creating parent directories as needed. Throws IoError.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::string_view content);

// Replaces characters that are unsafe in file names with '_'.
std::string SafeFileName(std::string_view name);

// One CSV line (with trailing newline); fields containing commas, quotes or
// newlines are quoted.
std::string CsvRow(const std::vector<std::string>& fields);

// Parses CSV text into rows of fields. Throws ValidationError on an
// unterminated quote.
std::vector<std::vector<std::string>> ParseCsv(std::string_view text);

}  // namespace capeval

#endif  // CAPEVAL_IO_H_
