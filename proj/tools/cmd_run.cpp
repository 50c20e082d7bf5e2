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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <mutex>
#include <semaphore>
#include <thread>

#include "commands.hpp"
#include "safedoe/campaign.hpp"
#include "safedoe/config.hpp"
#include "safedoe/errors.hpp"
#include "safedoe/trace.hpp"

namespace safedoe::cli {

namespace fs = std::filesystem;

std::vector<std::uint64_t> parse_seed_list(const std::vector<std::string>& entries) {
  std::vector<std::uint64_t> seeds;
  for (const std::string& entry : entries) {
    const std::size_t dots = entry.find("..");
    if (dots != std::string::npos) {
      const std::uint64_t a = std::stoull(entry.substr(0, dots));
      const std::uint64_t b = std::stoull(entry.substr(dots + 2));
      if (b < a) throw Error(ErrorCode::InvalidArgument, "bad seed range: " + entry);
      for (std::uint64_t s = a; s <= b; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(std::stoull(entry));
    }
  }
  return seeds;
}

namespace {

struct RunOutcome {
  std::string method;
  std::uint64_t seed = 0;
  std::string dir;
  double chi2 = 0.0;
  double chi2_ref = 0.0;
  int designed = 0;
  std::vector<int> violations;
  std::string termination;
  double wall_seconds = 0.0;
  bool aborted = false;
  std::string abort_path;
};

RunOutcome execute_one(campaign::CampaignConfig cfg, campaign::Method method,
                       std::uint64_t seed, const std::string& run_dir,
                       bool dump_surrogate) {
  cfg.method = method;
  cfg.seed = seed;
  fs::create_directories(run_dir);
  if (dump_surrogate) {
    cfg.surrogate_dump_dir = run_dir + "/surrogate";
    fs::create_directories(cfg.surrogate_dump_dir);
  }

  RunOutcome outcome;
  outcome.method = campaign::method_name(method);
  outcome.seed = seed;
  outcome.dir = run_dir;
  try {
    const campaign::CampaignState state = campaign::run_campaign(cfg);
    trace::write_trace(state, cfg, run_dir + "/trace.ndjson");
    trace::write_timing(state, run_dir + "/timing.csv");
    trace::write_summary(state, cfg, run_dir + "/summary.csv");
    trace::write_plotdata(state, cfg, run_dir + "/plotdata");
    outcome.chi2 = state.reports.empty() ? 0.0 : state.reports.back().chi2_sample;
    outcome.chi2_ref = state.reports.empty() ? 0.0 : state.reports.back().chi2_ref;
    outcome.designed = state.designed_count();
    for (std::size_t c = 0; c < cfg.case_study.constraints.size(); ++c)
      outcome.violations.push_back(state.violation_count(static_cast<int>(c)));
    outcome.termination = campaign::termination_name(state.termination);
    outcome.wall_seconds = state.wall_seconds;
  } catch (const campaign::CampaignAborted& aborted) {
    const std::string checkpoint = run_dir + "/checkpoint.ndjson";
    trace::write_trace(aborted.partial_state, cfg, checkpoint);
    outcome.aborted = true;
    outcome.abort_path = checkpoint;
    outcome.termination = std::string("aborted: ") + aborted.what();
  }
  return outcome;
}

}  // namespace

int cmd_run(const RunArgs& args) {
  config::Document doc;
  campaign::CampaignConfig base;
  try {
    doc = config::parse_file(args.config_path);
    config::apply_env_overrides(doc);
    base = config::build_campaign_config(doc);
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitSchema;
  }
  if (args.max_iters >= 0) base.max_iterations = args.max_iters;

  if (args.dry_run) {
    std::cout << config::serialize(config::resolved_document(base));
    return 0;
  }

  std::vector<campaign::Method> methods;
  const std::string method_choice = args.method.empty()
                                        ? campaign::method_name(base.method)
                                        : args.method;
  if (method_choice == "all")
    methods = {campaign::Method::Gp, campaign::Method::Mc, campaign::Method::De};
  else
    methods = {campaign::method_from_name(method_choice)};

  std::vector<std::uint64_t> seeds;
  try {
    seeds = args.seeds.empty() ? std::vector<std::uint64_t>{base.seed}
                               : parse_seed_list(args.seeds);
  } catch (const std::exception& e) {
    std::cerr << "seed error: " << e.what() << "\n";
    return kExitSchema;
  }

  fs::create_directories(args.out_dir);
  trace::Manifest manifest;
  manifest.config_path = args.config_path;
  for (campaign::Method m : methods) manifest.methods.push_back(campaign::method_name(m));
  manifest.seeds = seeds;
  manifest.out_dir = args.out_dir;
  write_manifest(manifest, args.out_dir + "/manifest.json");

  const int jobs = args.jobs > 0
                       ? args.jobs
                       : std::max(1u, std::thread::hardware_concurrency());
  std::counting_semaphore<256> slots(std::min(jobs, 256));

  std::vector<std::future<RunOutcome>> futures;
  for (campaign::Method method : methods) {
    for (std::uint64_t seed : seeds) {
      const std::string run_dir = args.out_dir + "/" +
                                  campaign::method_name(method) + "-seed" +
                                  std::to_string(seed);
      futures.push_back(std::async(std::launch::async, [&, method, seed, run_dir]() {
        slots.acquire();
        RunOutcome outcome = execute_one(base, method, seed, run_dir, args.dump_surrogate);
        slots.release();
        return outcome;
      }));
    }
  }

  std::vector<RunOutcome> outcomes;
  bool any_aborted = false;
  for (auto& f : futures) {
    outcomes.push_back(f.get());
    const RunOutcome& o = outcomes.back();
    if (o.aborted) {
      any_aborted = true;
      std::cerr << "campaign " << o.method << " seed " << o.seed << " "
                << o.termination << "; checkpoint: " << o.abort_path << "\n";
    } else {
      std::cout << o.method << " seed " << o.seed << ": " << o.designed
                << " designed experiments, chi2 " << o.chi2 << " (ref " << o.chi2_ref
                << "), termination " << o.termination << "\n";
    }
  }

  {
    std::ofstream agg(args.out_dir + "/aggregate.csv");
    agg.precision(12);
    agg << "method,seed,designed,chi2_sample,chi2_ref";
    for (std::size_t c = 0; c < base.case_study.constraints.size(); ++c)
      agg << ",violations_" << base.case_study.constraints[c].name << ",violation_rate_"
          << base.case_study.constraints[c].name;
    agg << ",termination,wall_seconds\n";
    for (const RunOutcome& o : outcomes) {
      if (o.aborted) continue;
      agg << o.method << "," << o.seed << "," << o.designed << "," << o.chi2 << ","
          << o.chi2_ref;
      for (int v : o.violations)
        agg << "," << v << ","
            << (o.designed > 0 ? static_cast<double>(v) / o.designed : 0.0);
      agg << "," << o.termination << "," << o.wall_seconds << "\n";
    }
  }

  for (const RunOutcome& o : outcomes) {
    if (o.aborted) continue;
    const fs::path dir(o.dir);
    for (const char* name : {"trace.ndjson", "summary.csv"}) {
      const fs::path p = dir / name;
      if (fs::exists(p))
        manifest.checksums[fs::relative(p, args.out_dir).string()] =
            trace::file_checksum_hex(p.string());
    }
  }
  write_manifest(manifest, args.out_dir + "/manifest.json");

  return any_aborted ? kExitRuntime : 0;
}

}  // namespace safedoe::cli
