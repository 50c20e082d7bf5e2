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

#ifndef SAFEDOE_ORACLES_HPP
#define SAFEDOE_ORACLES_HPP

#include <Eigen/Core>
#include <functional>

#include "safedoe/gp.hpp"

// Independent reference computations (closed forms, brute force, quadrature)
// used to cross-check the main code paths. Nothing here may call the code it
// is checking; keep these implementations self-contained.
namespace safedoe::oracles {

/// Two-point GP posterior by the explicit 2x2 solve.
struct TwoPointGp {
  gp::KernelSpec spec;
  Eigen::VectorXd x1, x2;
  double y1 = 0.0, y2 = 0.0;
  double prior1 = 0.0, prior2 = 0.0;  // prior mean at x1, x2
  std::function<double(const Eigen::VectorXd&)> prior;  // optional, at x*
};

struct MeanVar {
  double mean = 0.0;
  double variance = 0.0;
};

MeanVar gp_two_point_closed_form(const TwoPointGp& fixture, const Eigen::VectorXd& x_star);

/// Chi-square quantile by trapezoid integration of the density + bisection.
double chi_squared_quantile(double p, double dof);

/// Student-t quantile by the same route.
double student_t_quantile(double p, double dof);

/// log det via eigenvalue sum.
double log_det_eigen(const Eigen::MatrixXd& m);

/// Central finite-difference gradient of a scalar function.
Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double h = 1e-5);

/// Central finite-difference Hessian of a scalar function.
Eigen::MatrixXd fd_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& x, double h = 1e-4);

/// Monte-Carlo moments of model predictions under x* ~ N(mu, Sigma); samples
/// are pushed through GpModel::predict. Returns the mean of the posterior
/// mean and the law-of-total-variance estimate E[Sigma] + Var[m].
MeanVar mc_propagate(const gp::GpModel& model, const Eigen::VectorXd& mu,
                     const Eigen::MatrixXd& sigma, int n_samples, std::uint64_t seed);

/// Derivative-free Nelder-Mead minimizer, self-contained; used to re-solve
/// least-squares problems along an alternate route.
Eigen::VectorXd nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x0, double step, int max_evals);

}  // namespace safedoe::oracles

#endif  // SAFEDOE_ORACLES_HPP
