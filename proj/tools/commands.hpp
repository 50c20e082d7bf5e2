// Copyright 2026 The safedoe Authors
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

#ifndef SAFEDOE_TOOLS_COMMANDS_HPP
#define SAFEDOE_TOOLS_COMMANDS_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace safedoe::cli {

// Exit codes shared by the subcommands.
inline constexpr int kExitSchema = 2;
inline constexpr int kExitRuntime = 3;

struct RunArgs {
  std::string config_path;
  std::string method = "";  // empty = config value; "all" = gp, mc, de
  std::vector<std::string> seeds;  // entries: "7" or "0..19"
  std::string out_dir = "out";
  bool dry_run = false;
  int max_iters = -1;  // -1 = config value
  bool dump_surrogate = false;
  int jobs = 0;  // 0 = hardware concurrency
};

int cmd_run(const RunArgs& args);

struct CompareArgs {
  std::vector<std::string> trace_dirs;
  std::string out_dir = ".";
};

int cmd_compare(const CompareArgs& args);

struct OracleArgs {
  std::string name;
  std::vector<std::string> values;  // positional arguments after the name
  std::string fixture;
  int samples = 100000;
};

int cmd_oracle(const OracleArgs& args);

std::vector<std::uint64_t> parse_seed_list(const std::vector<std::string>& entries);

}  // namespace safedoe::cli

#endif  // SAFEDOE_TOOLS_COMMANDS_HPP
