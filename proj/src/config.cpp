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
#include "apmlmc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <locale>
#include <fstream>
#include <sstream>

#include "apmlmc/errors.hpp"

namespace apmlmc {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string bad_value(std::string_view key, const std::string& text, std::string_view what) {
  return std::string(key) + ": expected " + std::string(what) + ", got '" + text + "'";
}

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "alpha", "burn_in", "dist",      "dt",        "dt_fine",   "epsilon",    "eps_count", "eps_max",
      "eps_min", "k_v",       "k_x",       "levels",    "m_factor",   "max_levels", "min_levels", "out_path",
      "qoi",     "rmse",      "samples",   "seed",      "strategy",   "t_count",   "t_end",
      "t_max",   "t_min",     "tail_ratio", "threads",  "trace",      "v_char"};
  return keys;
}

bool is_known_key(std::string_view key) {
  const auto& keys = known_keys();
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

RunConfig RunConfig::parse(std::istream& in, std::string_view source) {
  RunConfig config;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = std::string(source) + ":" + std::to_string(number);
    if (eq == std::string::npos) throw InvalidParameter(where + ": expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (!is_known_key(key)) throw InvalidParameter(where + ": unknown key '" + key + "'");
    config.values_[key] = value;
  }
  return config;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("config: cannot open '" + path + "'");
  return parse(in, path);
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!is_known_key(key)) throw InvalidParameter("unknown key '" + key + "'");
  values_[key] = value;
}

std::optional<std::string> RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double parse_double(std::string_view key, const std::string& text) {
  std::istringstream in(text);
  in.imbue(std::locale::classic());
  double value = 0.0;
  if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  if (!(in >> value) || !(in >> std::ws).eof()) throw InvalidParameter(bad_value(key, text, "a number"));
  return value;
}

std::int64_t parse_int(std::string_view key, const std::string& text) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    // Accept integral values written in floating-point notation, e.g. 1e5.
    const double d = parse_double(key, text);
    if (d != std::floor(d) || std::abs(d) > 9.0e18) {
      throw InvalidParameter(bad_value(key, text, "an integer"));
    }
    return static_cast<std::int64_t>(d);
  }
  return value;
}

std::uint64_t parse_u64(std::string_view key, const std::string& text) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidParameter(bad_value(key, text, "an unsigned 64-bit integer"));
  }
  return value;
}

bool parse_bool(std::string_view key, const std::string& text) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw InvalidParameter(bad_value(key, text, "a boolean"));
}

}  // namespace apmlmc
