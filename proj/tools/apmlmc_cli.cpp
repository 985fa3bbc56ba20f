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
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "apmlmc/commands.hpp"
#include "apmlmc/config.hpp"
#include "apmlmc/errors.hpp"

int main(int argc, char** argv) {
  using apmlmc::kExitInvalid;

  CLI::App app{"Asymptotic-preserving particle scheme with coupled multilevel Monte Carlo"};
  app.require_subcommand(1);

  struct Invocation {
    std::string config_path;
    std::map<std::string, std::optional<std::string>> flags;
  };
  std::map<std::string, Invocation> invocations;

  for (const apmlmc::CommandSpec& spec : apmlmc::command_specs()) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.help);
    Invocation& inv = invocations[spec.name];
    sub->add_option("--config", inv.config_path, "key = value configuration file");
    auto add = [&](const std::string& key, const std::string& help) {
      std::optional<std::string>& slot = inv.flags[key];
      std::string flag = "--" + key;
      if (key == "out_path") flag = "--out," + flag;
      sub->add_option_function<std::string>(
          flag, [&slot](const std::string& v) { slot = v; }, help);
    };
    for (const apmlmc::KeySpec& key : spec.keys) {
      add(key.key, key.help + " (default " + key.default_value + ")");
    }
    add("threads", "worker threads; 0 uses all cores");
    add("out_path", "output CSV path; stdout when omitted");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  const Invocation& inv = invocations[name];

  apmlmc::RunConfig config;
  try {
    if (!inv.config_path.empty()) config = apmlmc::RunConfig::load(inv.config_path);
    for (const auto& [key, value] : inv.flags) {
      if (value) config.set(key, *value);
    }
  } catch (const apmlmc::InvalidParameter& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  const std::optional<std::string> out_path = config.get("out_path");
  if (out_path && !out_path->empty() && *out_path != "-") {
    std::ostringstream buffer;
    const int code = apmlmc::run_command(name, config, buffer, std::cout);
    if (code == kExitInvalid) return code;
    std::ofstream file(*out_path, std::ios::binary);
    if (!file) {
      std::cerr << "error: out_path: cannot write '" << *out_path << "'\n";
      return kExitInvalid;
    }
    file << buffer.str();
    return code;
  }
  return apmlmc::run_command(name, config, std::cout, std::cerr);
}
