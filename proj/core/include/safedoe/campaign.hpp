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

#ifndef SAFEDOE_CAMPAIGN_HPP
#define SAFEDOE_CAMPAIGN_HPP

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "safedoe/errors.hpp"
#include "safedoe/estimation.hpp"
#include "safedoe/kinetics.hpp"

namespace safedoe::campaign {

enum class Method { Gp, Mc, De };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

enum class Termination { None, DesignChange, Statistics, MaxIterations };

const char* termination_name(Termination t);

struct AlgorithmParams {
  double alpha_j = 0.5;
  double eta1 = 1e-3;
  double eta2 = 1e-2;
  double t1 = 2.0;
  double t2 = 0.5;
  double t3 = 0.5;
  double initial_radius = 0.3;
  int n_starts = 10;         // design-solve multistarts
  int gp_multistarts = 10;   // hyperparameter multistarts per GP
  int gp_refit_multistarts = 3;  // warm-started surrogate refits
  int mc_samples = 1000;     // posterior samples per backoff pass
  double backoff_tol = 1e-3;
  int backoff_max_passes = 10;
  int solver_max_iterations = 25;
  int gp_max_iterations = 30;
  int mle_multistarts = 10;
  int mle_max_iterations = 60;

  void validate() const;
};

struct CampaignConfig {
  kinetics::CaseStudy case_study;
  Method method = Method::Gp;
  AlgorithmParams algo;
  double tol1 = 1e-3;       // design-change termination, normalized units
  int max_iterations = 20;  // designed experiments budget
  std::uint64_t seed = 0;
  double alpha = 0.05;      // confidence level for the adequacy statistics
  int integrator_steps = 200;
  std::string surrogate_dump_dir;  // when set, audit CSV per iteration
};

/// Everything recorded about one campaign iteration (one designed
/// experiment, or the estimation-only pass when the budget is zero).
struct IterationRecord {
  int iteration = 0;
  // estimation
  Eigen::VectorXd theta;
  Eigen::VectorXd v_theta_diag;
  Eigen::VectorXd t_values;
  double t_ref = 0.0;
  double chi2_sample = 0.0;
  double chi2_ref = 0.0;
  bool stats_pass = false;
  // trust-region bookkeeping (GP method; empty otherwise)
  std::vector<double> rho;            // accuracy ratio per constraint, NaN if unavailable
  std::vector<bool> violated_prev;    // violation flags of the last executed experiment
  std::vector<double> radii;          // post-update radii
  bool design_held = false;
  bool solver_feasible = true;
  // design + execution
  Eigen::VectorXd u_design;           // physical units
  std::vector<double> tightened;      // tightened constraint values at u_design (GP)
  std::vector<double> g_pred_mean;    // constraint prediction at u_design, pre-execution
  std::vector<double> g_pred_sd;
  std::vector<double> backoffs;       // MC backoffs or DE disturbance estimates
  int backoff_passes = 0;
  Eigen::VectorXd y_measured;
  Eigen::VectorXd g_measured;
  double logdet_m0 = 0.0;
};

struct CampaignState {
  std::string case_id;
  Method method = Method::Gp;
  std::uint64_t seed = 0;
  std::vector<kinetics::Measurement> experiments;  // preliminary + designed
  int n_preliminary = 0;
  std::vector<estimation::FitReport> reports;
  std::vector<IterationRecord> iterations;
  Termination termination = Termination::None;
  Eigen::VectorXd theta_final;
  Eigen::VectorXd v_theta_diag_final;
  std::vector<double> final_radii;
  // wall-clock; kept out of the deterministic trace
  double wall_seconds = 0.0;
  std::vector<double> iteration_seconds;

  int designed_count() const {
    return static_cast<int>(experiments.size()) - n_preliminary;
  }
  /// Violations among designed experiments, judged on measured g.
  int violation_count(int constraint_index) const;
};

struct TerminationDecision {
  bool stop = false;
  Termination reason = Termination::None;
};

/// Stop when two consecutive solver-produced designs coincide within tol1
/// (normalized) or when the chi-square and every t-test pass.
TerminationDecision check_termination(const std::optional<Eigen::VectorXd>& prev_norm,
                                      const std::optional<Eigen::VectorXd>& last_norm,
                                      const estimation::FitReport& report, double tol1);

/// Linear-interpolation empirical quantile; the backoff estimator.
double empirical_quantile(std::vector<double> values, double q);

/// Thrown when a sub-module raises a structured error mid-campaign. Carries
/// the partial state so callers can checkpoint it.
class CampaignAborted : public Error {
 public:
  CampaignAborted(const Error& cause, CampaignState state)
      : Error(cause.code(), cause.what()), partial_state(std::move(state)) {}

  CampaignState partial_state;
};

/// Run one campaign with the configured method.
CampaignState run_campaign(const CampaignConfig& config);

CampaignState run_gp_mbdoe(const CampaignConfig& config);
CampaignState run_mc_mbdoe(const CampaignConfig& config);
CampaignState run_de_mbdoe(const CampaignConfig& config);

}  // namespace safedoe::campaign

#endif  // SAFEDOE_CAMPAIGN_HPP
