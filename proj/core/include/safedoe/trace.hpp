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

#ifndef SAFEDOE_TRACE_HPP
#define SAFEDOE_TRACE_HPP

#include <map>
#include <string>
#include <vector>

#include "safedoe/campaign.hpp"

namespace safedoe::trace {

/// Writes the newline-delimited JSON campaign trace. Content is fully
/// determined by (config, seed): wall-clock goes to the timing sidecar, not
/// here, so identical runs produce byte-identical files.
void write_trace(const campaign::CampaignState& state,
                 const campaign::CampaignConfig& config, const std::string& path);

/// Per-iteration wall-clock sidecar (iteration, seconds).
void write_timing(const campaign::CampaignState& state, const std::string& path);

/// Final-estimate table plus campaign metrics, one file per run.
void write_summary(const campaign::CampaignState& state,
                   const campaign::CampaignConfig& config, const std::string& path);

/// Plot-ready CSVs: per-constraint values with prediction bands, parameter
/// trajectories with confidence half-widths, trust-region radii, and the
/// design-variable sequence.
void write_plotdata(const campaign::CampaignState& state,
                    const campaign::CampaignConfig& config, const std::string& dir);

/// FNV-1a 64-bit checksum of a file's bytes, as fixed-width hex.
std::string file_checksum_hex(const std::string& path);

struct Manifest {
  std::string config_path;
  std::vector<std::string> methods;
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
  std::map<std::string, std::string> checksums;  // relative path -> hex
};

/// Written before any run starts; rewritten with checksums afterwards.
void write_manifest(const Manifest& manifest, const std::string& path);

/// A parsed trace, enough for replay checks and comparisons.
struct LoadedTrace {
  std::string case_id;
  std::string method;
  std::uint64_t seed = 0;
  int n_preliminary = 0;
  double initial_radius = 0.0;
  double t1 = 0.0, t2 = 0.0, t3 = 0.0, eta1 = 0.0, eta2 = 0.0;
  std::string termination;
  double final_chi2 = 0.0;
  double final_chi2_ref = 0.0;
  int n_experiments = 0;
  struct Iteration {
    int iteration = 0;
    std::vector<double> rho;  // NaN when unavailable
    std::vector<bool> violated_prev;
    std::vector<double> radii;
    std::vector<double> g_measured;
    std::vector<double> u;
    bool design_held = false;
  };
  std::vector<Iteration> iterations;
};

LoadedTrace load_trace(const std::string& path);

/// Recomputes every radius from the recorded accuracy ratios and violation
/// flags and compares against the recorded radii. Returns false (with a
/// message) on the first mismatch; exact equality is required.
bool replay_trust_regions(const LoadedTrace& trace, std::string* error);

}  // namespace safedoe::trace

#endif  // SAFEDOE_TRACE_HPP
