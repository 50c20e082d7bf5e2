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

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "safedoe: safe model-based design of experiments for kinetic models\n"
      "Closed-loop estimate/design/execute campaigns with GP-based chance\n"
      "constraints, plus Monte-Carlo-backoff and disturbance-estimation\n"
      "baselines."};
  app.require_subcommand(1);

  safedoe::cli::RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "Run seeded campaigns from a config file");
  run->add_option("--config", run_args.config_path, "Path to the TOML config")
      ->required();
  run->add_option("--method", run_args.method, "gp, mc, de, or all")
      ->check(CLI::IsMember({"gp", "mc", "de", "all"}));
  run->add_option("--seed", run_args.seeds, "Campaign seed (repeatable)");
  run->add_option("--seeds", run_args.seeds,
                  "Seed list: comma-separated values and a..b ranges")
      ->delimiter(',');
  run->add_option("--out", run_args.out_dir, "Output directory (default: out)");
  run->add_flag("--dry-run", run_args.dry_run,
                "Validate the config, print resolved parameters, write nothing");
  run->add_option("--max-iters", run_args.max_iters, "Override campaign.max_iterations");
  run->add_flag("--dump-surrogate", run_args.dump_surrogate,
                "Write the objective-surrogate training set per iteration");
  run->add_option("--jobs", run_args.jobs, "Parallel campaigns (default: cores)");

  safedoe::cli::CompareArgs compare_args;
  CLI::App* compare =
      app.add_subcommand("compare", "Compare campaign traces across methods");
  compare->add_option("dirs", compare_args.trace_dirs, "Two or more trace directories")
      ->expected(-2);
  compare->add_option("--out", compare_args.out_dir, "Report directory (default: .)");

  safedoe::cli::OracleArgs oracle_args;
  CLI::App* oracle = app.add_subcommand(
      "oracle", "Run an independent reference computation against the library");
  oracle->add_option("name", oracle_args.name,
                     "cantelli | gp2pt | mc-propagate | fd-sens | quantiles")
      ->required();
  oracle->add_option("values", oracle_args.values, "Positional oracle arguments");
  oracle->add_option("--fixture", oracle_args.fixture, "JSON fixture path (gp2pt)");
  oracle->add_option("--samples", oracle_args.samples, "Monte-Carlo sample count");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return safedoe::cli::cmd_run(run_args);
  if (compare->parsed()) return safedoe::cli::cmd_compare(compare_args);
  if (oracle->parsed()) return safedoe::cli::cmd_oracle(oracle_args);
  return 1;
}
