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

#ifndef SAFEDOE_ESTIMATION_HPP
#define SAFEDOE_ESTIMATION_HPP

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "safedoe/kinetics.hpp"

namespace safedoe::estimation {

/// Gaussian (Laplace) approximation of the parameter posterior.
struct PosteriorGaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  int dof = 0;  // n_y - n_theta
  bool pseudo_inverse_used = false;
};

/// A-posteriori adequacy statistics for one fit.
struct FitReport {
  Eigen::VectorXd theta;
  Eigen::VectorXd covariance_diagonal;
  double chi2_sample = 0.0;
  double chi2_ref = 0.0;
  Eigen::VectorXd t_values;
  double t_ref = 0.0;
  std::vector<bool> t_pass;
  bool chi2_pass = false;
  int dof = 0;
  double alpha = 0.05;

  bool all_pass() const;
};

struct MleOptions {
  int n_multistarts = 10;
  Eigen::VectorXd theta_lo;
  Eigen::VectorXd theta_hi;
  std::uint64_t seed = 0;
  std::optional<Eigen::VectorXd> warm_start;
  int max_iterations = 60;              // winner polish budget
  int exploration_max_iterations = 25;  // per multistart probe
};

struct MleResult {
  Eigen::VectorXd theta;
  double cost = 0.0;  // 0.5 * weighted SSR
  bool converged = false;
  bool underdetermined = false;  // fewer observations than parameters
};

/// Weighted residual stack (y_model - y_obs) / sigma over all experiments.
Eigen::VectorXd weighted_residuals(const Eigen::VectorXd& theta,
                                   const std::vector<kinetics::Measurement>& data,
                                   const kinetics::KineticModel& model,
                                   const Eigen::VectorXd& noise_std,
                                   int integrator_steps = 200);

/// Maximum-likelihood estimate: best of n_multistarts bounded
/// Levenberg-Marquardt solves of the weighted least-squares problem.
/// Pre-exponential starts are drawn log-uniform, activation energies uniform.
MleResult mle_fit(const std::vector<kinetics::Measurement>& data,
                  const kinetics::KineticModel& model,
                  const Eigen::VectorXd& noise_std, const MleOptions& options);

/// Gauss-Newton covariance: inverse of sum_b J_b^T Sigma^-1 J_b, symmetrized
/// and floored to stay positive semidefinite. Falls back to a pseudo-inverse
/// (flagged) when the information matrix is singular.
PosteriorGaussian laplace_posterior(const Eigen::VectorXd& theta,
                                    const std::vector<kinetics::Measurement>& data,
                                    const kinetics::KineticModel& model,
                                    const Eigen::VectorXd& noise_std,
                                    int integrator_steps = 200);

/// Chi-square adequacy and per-parameter t statistics at confidence 1-alpha.
/// Throws Error(DegreesOfFreedom) when n_y - n_theta < 1.
FitReport statistics(const Eigen::VectorXd& theta, const PosteriorGaussian& posterior,
                     const std::vector<kinetics::Measurement>& data,
                     const kinetics::KineticModel& model,
                     const Eigen::VectorXd& noise_std, double alpha = 0.05,
                     int integrator_steps = 200);

}  // namespace safedoe::estimation

#endif  // SAFEDOE_ESTIMATION_HPP
