// Copyright 2026 The sftmix Authors.
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

#ifndef SFTMIX_SRC_TEXT_UTIL_H_
#define SFTMIX_SRC_TEXT_UTIL_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sftmix::internal {

std::string ReadFile(const std::filesystem::path& path);  // throws IoError
// Writes via a temporary sibling and rename.
void WriteFile(const std::filesystem::path& path, std::string_view contents);

// Splits on '\n'; a trailing newline does not produce an empty last line.
std::vector<std::string_view> SplitLines(std::string_view text);
std::string_view Trim(std::string_view text);
bool IsBlank(std::string_view text);

// Shortest decimal form that parses back to the same double.
std::string ShortestDouble(double value);

}  // namespace sftmix::internal

#endif  // SFTMIX_SRC_TEXT_UTIL_H_
