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

#ifndef CAPEVAL_TOKENIZER_H_
#define CAPEVAL_TOKENIZER_H_

#include <string>
#include <string_view>
#include <vector>

namespace capeval {

// Lowercases ASCII letters and splits on whitespace and punctuation. The
// apostrophe is a token character, so "don't" stays one token. Bytes >= 0x80
// (UTF-8 continuation and lead bytes) are token characters as well.
std::vector<std::string> Tokenize(std::string_view text);

// True for characters that belong inside a token.
bool IsTokenChar(unsigned char c);

std::string AsciiLower(std::string_view s);

}  // namespace capeval

#endif  // CAPEVAL_TOKENIZER_H_
