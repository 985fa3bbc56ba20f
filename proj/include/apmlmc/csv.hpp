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

#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace apmlmc {

// 17 significant digits; parses back to the identical double.
std::string format_number(double value);

using HeaderEntries = std::vector<std::pair<std::string, std::string>>;

// One "# key = value" line per entry.
void write_header(std::ostream& out, const HeaderEntries& entries);

// Joins cells with commas and terminates the row.
void write_row(std::ostream& out, const std::vector<std::string>& cells);

}  // namespace apmlmc
