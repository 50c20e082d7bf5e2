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
#include <iostream>
#include <map>
#include <sstream>

#include "commands.hpp"
#include "safedoe/errors.hpp"
#include "safedoe/trace.hpp"

namespace safedoe::cli {

namespace fs = std::filesystem;

namespace {

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// Wall-clock total from the timing sidecar next to a trace, if present.
double read_wall_seconds(const fs::path& trace_path) {
  const fs::path timing = trace_path.parent_path() / "timing.csv";
  std::ifstream in(timing);
  if (!in) return 0.0;
  std::string line;
  double total = 0.0;
  while (std::getline(in, line)) {
    if (line.rfind("total,", 0) == 0) total = std::stod(line.substr(6));
  }
  return total;
}

struct MethodStats {
  std::vector<double> chi2;
  std::vector<double> experiments;
  std::vector<double> wall;
  int violations = 0;
  int designed = 0;
  std::map<std::size_t, int> violations_per_constraint;
};

}  // namespace

int cmd_compare(const CompareArgs& args) {
  if (args.trace_dirs.size() < 2) {
    std::cerr << "compare needs at least two trace directories\n";
    return kExitSchema;
  }

  std::map<std::string, MethodStats> stats;
  std::string case_id;
  try {
    for (const std::string& dir : args.trace_dirs) {
      if (!fs::exists(dir))
        throw Error(ErrorCode::Io, "no such directory: " + dir);
      for (const fs::directory_entry& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().filename() != "trace.ndjson")
          continue;
        const trace::LoadedTrace t = trace::load_trace(entry.path().string());
        if (case_id.empty()) case_id = t.case_id;
        if (t.case_id != case_id)
          throw Error(ErrorCode::IncompatibleTraces,
                      "cannot compare case studies '" + case_id + "' and '" +
                          t.case_id + "' (" + entry.path().string() + ")");
        MethodStats& s = stats[t.method];
        s.chi2.push_back(t.final_chi2);
        s.experiments.push_back(static_cast<double>(t.n_experiments));
        s.wall.push_back(read_wall_seconds(entry.path()));
        for (const trace::LoadedTrace::Iteration& it : t.iterations) {
          ++s.designed;
          for (std::size_t c = 0; c < it.g_measured.size(); ++c)
            if (it.g_measured[c] > 0.0) {
              ++s.violations;
              ++s.violations_per_constraint[c];
            }
        }
      }
    }
  } catch (const Error& e) {
    std::cerr << "compare error: " << e.what() << "\n";
    return e.code() == ErrorCode::IncompatibleTraces ? kExitSchema : kExitRuntime;
  }
  if (stats.empty()) {
    std::cerr << "no trace.ndjson files found\n";
    return kExitSchema;
  }

  std::ostringstream md, csv;
  md << "# Campaign comparison (" << case_id << ")\n\n";
  md << "| method | runs | median final chi2 | violations | designed | violation rate "
        "| median experiments | median wall (s) |\n";
  md << "|---|---|---|---|---|---|---|---|\n";
  csv << "method,runs,median_chi2,violations,designed,violation_rate,"
         "median_experiments,median_wall_seconds\n";
  for (const auto& [method, s] : stats) {
    const double rate = s.designed > 0 ? static_cast<double>(s.violations) / s.designed : 0.0;
    md << "| " << method << " | " << s.chi2.size() << " | " << median(s.chi2) << " | "
       << s.violations << " | " << s.designed << " | " << rate << " | "
       << median(s.experiments) << " | " << median(s.wall) << " |\n";
    csv << method << "," << s.chi2.size() << "," << median(s.chi2) << ","
        << s.violations << "," << s.designed << "," << rate << ","
        << median(s.experiments) << "," << median(s.wall) << "\n";
  }

  std::cout << md.str();
  fs::create_directories(args.out_dir);
  std::ofstream(args.out_dir + "/compare.md") << md.str();
  std::ofstream(args.out_dir + "/compare.csv") << csv.str();
  return 0;
}

}  // namespace safedoe::cli
