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

#ifndef SAFEDOE_SAFE_OPT_HPP
#define SAFEDOE_SAFE_OPT_HPP

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "safedoe/gp.hpp"
#include "safedoe/kinetics.hpp"

namespace safedoe::safeopt {

/// Distributionally robust tightening factor r = sqrt((1 - eps) / eps) for
/// P(q <= 0) >= 1 - eps over all distributions with known mean and variance.
double cantelli_r(double epsilon);

/// One probabilistic constraint backed by a mismatch GP whose prior mean is
/// the parametric model prediction. Feasible iff tightened(u) <= 0.
struct ChanceConstraint {
  int index = 0;
  kinetics::ConstraintDef def;
  double epsilon = 0.1;
  std::shared_ptr<const gp::GpModel> mismatch_gp;  // inputs are normalized u

  /// m_g(u) + r sqrt(Sigma_g(u)) with r recomputed from epsilon.
  double tightened(const Eigen::VectorXd& u_norm) const;
};

/// Per-constraint adaptive radius in normalized design units.
struct TrustRegion {
  double radius = 0.3;
  double eta1 = 1e-3;
  double eta2 = 1e-2;
  double t1 = 2.0;   // growth, > 1
  double t2 = 0.5;   // shrink on poor prediction, < 1
  double t3 = 0.5;   // shrink on observed violation, < 1

  void validate() const;
};

/// Prediction accuracy ratio rho = ((g_obs - g_pred) / g_obs)^2; |g_obs|
/// below 1e-6 is floored to avoid division blow-up.
double tr_rho(double g_observed, double g_predicted);

/// One accuracy update: rho <= eta1 grows the radius by t1, rho >= eta2
/// shrinks it by t2, the dead band leaves it unchanged.
TrustRegion tr_update(const TrustRegion& tr, double rho);

struct Ball {
  Eigen::VectorXd center;  // normalized coordinates
  double radius = 0.0;
};

struct SolveOptions {
  int n_starts = 10;
  std::uint64_t seed = 0;
  int max_iterations = 40;
  double penalty_init = 1e3;
  int penalty_rounds = 4;      // penalty escalates x10 per round
  double feasibility_tol = 1e-6;
  double fd_step = 1e-6;
};

struct SolveResult {
  Eigen::VectorXd u;  // normalized coordinates
  double objective = 0.0;
  bool feasible = false;
  int evaluations = 0;
};

/// Multi-start penalty solve of
///   min f(u)  s.t.  c_i(u) <= 0,  ||u - ball.center|| <= ball.radius,
///   u in [-1, 1]^d
/// in normalized coordinates. Starts come from a Latin hypercube inside the
/// ball (plus the center). A returned feasible point satisfies the ball and
/// box exactly and the constraints within options.feasibility_tol. When no
/// start is feasible the ball center is returned with feasible = false.
SolveResult solve_penalized(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const std::vector<std::function<double(const Eigen::VectorXd&)>>& constraints,
    const std::optional<Ball>& ball, const SolveOptions& options);

/// The design step: minimize the surrogate lower-confidence objective over
/// the tightened chance constraints and the pooled trust-region ball
/// min_i(R_i) around the previous design u_k (all normalized).
SolveResult solve_design(
    const std::function<double(const Eigen::VectorXd&)>& objective_norm,
    const std::vector<ChanceConstraint>& constraints,
    const std::vector<TrustRegion>& trust_regions, const Eigen::VectorXd& u_k_norm,
    const SolveOptions& options);

}  // namespace safedoe::safeopt

#endif  // SAFEDOE_SAFE_OPT_HPP
