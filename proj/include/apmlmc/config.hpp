/*
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================
*/
#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace apmlmc {

// Flat key = value settings. Later assignments override earlier ones, so
// command-line flags applied after the file take precedence.
class RunConfig {
 public:
  // Lines of "key = value"; '#' starts a comment. Throws InvalidParameter on
  // malformed lines or unknown keys, naming the source and line.
  static RunConfig parse(std::istream& in, std::string_view source = "config");
  static RunConfig load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

bool is_known_key(std::string_view key);
const std::vector<std::string>& known_keys();

// Strict conversions; the whole text must be consumed. Errors name the key.
double parse_double(std::string_view key, const std::string& text);
std::int64_t parse_int(std::string_view key, const std::string& text);
std::uint64_t parse_u64(std::string_view key, const std::string& text);
bool parse_bool(std::string_view key, const std::string& text);

}  // namespace apmlmc
