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

#include "safedoe/trace.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "safedoe/errors.hpp"
#include "safedoe/rng.hpp"
#include "safedoe/safe_opt.hpp"
#include "safedoe/stats.hpp"

namespace safedoe::trace {

namespace {

using nlohmann::json;

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json doubles_to_json(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) {
    if (std::isnan(x))
      out.push_back(nullptr);
    else
      out.push_back(x);
  }
  return out;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  return out;
}

}  // namespace

void write_trace(const campaign::CampaignState& state,
                 const campaign::CampaignConfig& config, const std::string& path) {
  std::ofstream out = open_for_write(path);

  json header;
  header["type"] = "header";
  header["case"] = state.case_id;
  header["method"] = campaign::method_name(state.method);
  header["seed"] = state.seed;
  header["n_preliminary"] = state.n_preliminary;
  header["tol1"] = config.tol1;
  header["max_iterations"] = config.max_iterations;
  header["alpha"] = config.alpha;
  json algo;
  algo["alpha_j"] = config.algo.alpha_j;
  algo["eta1"] = config.algo.eta1;
  algo["eta2"] = config.algo.eta2;
  algo["t1"] = config.algo.t1;
  algo["t2"] = config.algo.t2;
  algo["t3"] = config.algo.t3;
  algo["initial_radius"] = config.algo.initial_radius;
  algo["n_starts"] = config.algo.n_starts;
  algo["gp_multistarts"] = config.algo.gp_multistarts;
  algo["mc_samples"] = config.algo.mc_samples;
  json epsilons = json::array();
  for (const kinetics::ConstraintDef& c : config.case_study.constraints)
    epsilons.push_back(c.epsilon);
  algo["epsilon"] = epsilons;
  header["algorithm"] = algo;
  out << header.dump() << "\n";

  for (int i = 0; i < state.n_preliminary; ++i) {
    const kinetics::Measurement& m = state.experiments[static_cast<std::size_t>(i)];
    json rec;
    rec["type"] = "preliminary";
    rec["index"] = m.index;
    rec["u"] = vector_to_json(m.u);
    rec["y"] = vector_to_json(m.y);
    rec["g"] = vector_to_json(m.g);
    out << rec.dump() << "\n";
  }

  for (const campaign::IterationRecord& it : state.iterations) {
    json rec;
    rec["type"] = "iteration";
    rec["iteration"] = it.iteration;
    rec["theta"] = vector_to_json(it.theta);
    rec["v_theta_diag"] = vector_to_json(it.v_theta_diag);
    rec["t_values"] = vector_to_json(it.t_values);
    rec["t_ref"] = it.t_ref;
    rec["chi2_sample"] = it.chi2_sample;
    rec["chi2_ref"] = it.chi2_ref;
    rec["stats_pass"] = it.stats_pass;
    rec["rho"] = doubles_to_json(it.rho);
    rec["violated_prev"] = it.violated_prev;
    rec["radii"] = doubles_to_json(it.radii);
    rec["design_held"] = it.design_held;
    rec["solver_feasible"] = it.solver_feasible;
    rec["u"] = vector_to_json(it.u_design);
    rec["tightened"] = doubles_to_json(it.tightened);
    rec["g_pred_mean"] = doubles_to_json(it.g_pred_mean);
    rec["g_pred_sd"] = doubles_to_json(it.g_pred_sd);
    rec["backoffs"] = doubles_to_json(it.backoffs);
    rec["backoff_passes"] = it.backoff_passes;
    rec["y"] = vector_to_json(it.y_measured);
    rec["g"] = vector_to_json(it.g_measured);
    rec["logdet_m0"] = it.logdet_m0;
    out << rec.dump() << "\n";
  }

  json final_rec;
  final_rec["type"] = "final";
  final_rec["termination"] = campaign::termination_name(state.termination);
  final_rec["theta"] = vector_to_json(state.theta_final);
  final_rec["v_theta_diag"] = vector_to_json(state.v_theta_diag_final);
  final_rec["n_experiments"] = state.experiments.size();
  final_rec["final_radii"] = doubles_to_json(state.final_radii);
  if (!state.reports.empty()) {
    final_rec["chi2_sample"] = state.reports.back().chi2_sample;
    final_rec["chi2_ref"] = state.reports.back().chi2_ref;
  }
  out << final_rec.dump() << "\n";
}

void write_timing(const campaign::CampaignState& state, const std::string& path) {
  std::ofstream out = open_for_write(path);
  out << "iteration,seconds\n";
  out.precision(6);
  for (std::size_t i = 0; i < state.iteration_seconds.size(); ++i)
    out << i + 1 << "," << std::fixed << state.iteration_seconds[i] << "\n";
  out << "total," << std::fixed << state.wall_seconds << "\n";
}

void write_summary(const campaign::CampaignState& state,
                   const campaign::CampaignConfig& config, const std::string& path) {
  std::ofstream out = open_for_write(path);
  out.precision(12);
  out << "kind,name,estimate,t_value,t_ref,t_value_initial,t_ref_initial\n";
  const estimation::FitReport* first = state.reports.empty() ? nullptr : &state.reports.front();
  const estimation::FitReport* last = state.reports.empty() ? nullptr : &state.reports.back();
  const auto& names = config.case_study.approx_model.parameter_names;
  if (last != nullptr) {
    for (Eigen::Index j = 0; j < last->theta.size(); ++j) {
      out << "parameter," << names[static_cast<std::size_t>(j)] << "," << last->theta[j]
          << "," << last->t_values[j] << "," << last->t_ref << ","
          << first->t_values[j] << "," << first->t_ref << "\n";
    }
  }
  out << "metric,chi2_sample," << (last ? last->chi2_sample : 0.0) << ",,,,\n";
  out << "metric,chi2_ref," << (last ? last->chi2_ref : 0.0) << ",,,,\n";
  out << "metric,experiments," << state.experiments.size() << ",,,,\n";
  out << "metric,designed," << state.designed_count() << ",,,,\n";
  for (std::size_t c = 0; c < config.case_study.constraints.size(); ++c) {
    const int violations = state.violation_count(static_cast<int>(c));
    out << "metric,violations_" << config.case_study.constraints[c].name << ","
        << violations << ",,,,\n";
    const int designed = state.designed_count();
    out << "metric,violation_rate_" << config.case_study.constraints[c].name << ","
        << (designed > 0 ? static_cast<double>(violations) / designed : 0.0) << ",,,,\n";
  }
  out << "metric,termination," << campaign::termination_name(state.termination)
      << ",,,,\n";
  out << "metric,wall_seconds," << state.wall_seconds << ",,,,\n";
}

void write_plotdata(const campaign::CampaignState& state,
                    const campaign::CampaignConfig& config, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const kinetics::CaseStudy& cs = config.case_study;
  const std::size_t n_constraints = cs.constraints.size();

  // Constraint values vs experiment index, with the 3-sigma prediction band
  // recorded at design time. Preliminary rows have no band.
  for (std::size_t c = 0; c < n_constraints; ++c) {
    std::ofstream out =
        open_for_write(dir + "/constraint_" + cs.constraints[c].name + ".csv");
    out.precision(12);
    out << "experiment,is_preliminary";
    for (const std::string& name : cs.bounds.names) out << "," << name;
    out << ",g_measured,pred_mean,pred_lo,pred_hi\n";
    for (std::size_t e = 0; e < state.experiments.size(); ++e) {
      const kinetics::Measurement& m = state.experiments[e];
      const bool preliminary = static_cast<int>(e) < state.n_preliminary;
      out << m.index << "," << (preliminary ? 1 : 0);
      for (Eigen::Index j = 0; j < m.u.size(); ++j) out << "," << m.u[j];
      out << "," << m.g[static_cast<Eigen::Index>(c)];
      if (preliminary) {
        out << ",,,\n";
      } else {
        const campaign::IterationRecord& it =
            state.iterations[e - static_cast<std::size_t>(state.n_preliminary)];
        if (c < it.g_pred_mean.size()) {
          const double mean = it.g_pred_mean[c];
          const double sd = it.g_pred_sd[c];
          out << "," << mean << "," << mean - 3.0 * sd << "," << mean + 3.0 * sd << "\n";
        } else {
          out << ",,,\n";
        }
      }
    }
  }

  {
    std::ofstream out = open_for_write(dir + "/parameters.csv");
    out.precision(12);
    out << "iteration";
    for (const std::string& name : cs.approx_model.parameter_names)
      out << "," << name << "," << name << "_ci95";
    out << "\n";
    for (std::size_t r = 0; r < state.reports.size(); ++r) {
      const estimation::FitReport& report = state.reports[r];
      out << r + 1;
      for (Eigen::Index j = 0; j < report.theta.size(); ++j) {
        const double half_width =
            report.t_ref * std::sqrt(std::max(report.covariance_diagonal[j], 0.0));
        out << "," << report.theta[j] << "," << half_width;
      }
      out << "\n";
    }
  }

  if (state.method == campaign::Method::Gp) {
    std::ofstream out = open_for_write(dir + "/trust_region.csv");
    out.precision(12);
    out << "iteration";
    for (std::size_t c = 0; c < n_constraints; ++c)
      out << ",R_" << cs.constraints[c].name;
    out << "\n";
    for (const campaign::IterationRecord& it : state.iterations) {
      out << it.iteration;
      for (double r : it.radii) out << "," << r;
      out << "\n";
    }
  }

  {
    std::ofstream out = open_for_write(dir + "/designs.csv");
    out.precision(12);
    out << "experiment,is_preliminary";
    for (const std::string& name : cs.bounds.names) out << "," << name;
    out << "\n";
    for (std::size_t e = 0; e < state.experiments.size(); ++e) {
      const kinetics::Measurement& m = state.experiments[e];
      out << m.index << "," << (static_cast<int>(e) < state.n_preliminary ? 1 : 0);
      for (Eigen::Index j = 0; j < m.u.size(); ++j) out << "," << m.u[j];
      out << "\n";
    }
  }
}

std::string file_checksum_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path + " for checksum");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::uint64_t h = rng::fnv1a64(buffer.str());
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << h;
  return hex.str();
}

void write_manifest(const Manifest& manifest, const std::string& path) {
  json doc;
  doc["config"] = manifest.config_path;
  doc["methods"] = manifest.methods;
  doc["seeds"] = manifest.seeds;
  doc["out_dir"] = manifest.out_dir;
  if (!manifest.checksums.empty()) doc["checksums"] = manifest.checksums;
  std::ofstream out = open_for_write(path);
  out << doc.dump(2) << "\n";
}

LoadedTrace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open trace: " + path);
  LoadedTrace trace;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json rec = json::parse(line);
    const std::string type = rec.at("type").get<std::string>();
    if (type == "header") {
      trace.case_id = rec.at("case").get<std::string>();
      trace.method = rec.at("method").get<std::string>();
      trace.seed = rec.at("seed").get<std::uint64_t>();
      trace.n_preliminary = rec.at("n_preliminary").get<int>();
      const json& algo = rec.at("algorithm");
      trace.initial_radius = algo.at("initial_radius").get<double>();
      trace.t1 = algo.at("t1").get<double>();
      trace.t2 = algo.at("t2").get<double>();
      trace.t3 = algo.at("t3").get<double>();
      trace.eta1 = algo.at("eta1").get<double>();
      trace.eta2 = algo.at("eta2").get<double>();
    } else if (type == "iteration") {
      LoadedTrace::Iteration it;
      it.iteration = rec.at("iteration").get<int>();
      for (const json& v : rec.at("rho"))
        it.rho.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                     : v.get<double>());
      for (const json& v : rec.at("violated_prev")) it.violated_prev.push_back(v.get<bool>());
      for (const json& v : rec.at("radii")) it.radii.push_back(v.get<double>());
      for (const json& v : rec.at("g")) it.g_measured.push_back(v.get<double>());
      for (const json& v : rec.at("u")) it.u.push_back(v.get<double>());
      it.design_held = rec.at("design_held").get<bool>();
      trace.iterations.push_back(std::move(it));
    } else if (type == "final") {
      trace.termination = rec.at("termination").get<std::string>();
      trace.n_experiments = rec.at("n_experiments").get<int>();
      if (rec.contains("chi2_sample")) trace.final_chi2 = rec.at("chi2_sample").get<double>();
      if (rec.contains("chi2_ref")) trace.final_chi2_ref = rec.at("chi2_ref").get<double>();
    }
  }
  if (trace.case_id.empty())
    throw Error(ErrorCode::Io, "trace has no header record: " + path);
  return trace;
}

bool replay_trust_regions(const LoadedTrace& trace, std::string* error) {
  if (trace.method != "gp") return true;  // baselines carry no radii
  std::vector<double> radii;
  for (const LoadedTrace::Iteration& it : trace.iterations) {
    if (radii.empty()) radii.assign(it.radii.size(), trace.initial_radius);
    for (std::size_t c = 0; c < radii.size(); ++c) {
      safeopt::TrustRegion tr;
      tr.radius = radii[c];
      tr.eta1 = trace.eta1;
      tr.eta2 = trace.eta2;
      tr.t1 = trace.t1;
      tr.t2 = trace.t2;
      tr.t3 = trace.t3;
      if (c < it.rho.size() && !std::isnan(it.rho[c])) tr = safeopt::tr_update(tr, it.rho[c]);
      if (c < it.violated_prev.size() && it.violated_prev[c]) tr.radius *= tr.t3;
      radii[c] = tr.radius;
      if (c >= it.radii.size() || radii[c] != it.radii[c]) {
        if (error != nullptr) {
          std::ostringstream os;
          os << "iteration " << it.iteration << " constraint " << c << ": replayed "
             << radii[c] << " vs recorded "
             << (c < it.radii.size() ? it.radii[c] : std::numeric_limits<double>::quiet_NaN());
          *error = os.str();
        }
        return false;
      }
    }
  }
  return true;
}

}  // namespace safedoe::trace
