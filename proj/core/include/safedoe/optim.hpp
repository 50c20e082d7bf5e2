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

#ifndef SAFEDOE_OPTIM_HPP
#define SAFEDOE_OPTIM_HPP

#include <Eigen/Core>
#include <functional>

namespace safedoe::optim {

struct BoxBounds {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const {
    return x.cwiseMax(lo).cwiseMin(hi);
  }
  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const {
    return ((x.array() >= lo.array() - tol) && (x.array() <= hi.array() + tol)).all();
  }
};

/// Objective with optional gradient output. When `grad` is non-null the
/// callee must fill it with the gradient at `x`.
using ObjectiveFn = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

struct LbfgsOptions {
  int max_iterations = 100;
  int history = 8;
  double grad_tol = 1e-6;   // on the projected gradient, infinity norm
  double step_tol = 1e-12;  // line-search step collapse
  double value_tol = 0.0;   // relative stagnation exit; 0 disables
};

struct OptimResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Box-projected L-BFGS with Armijo backtracking. Local minimizer; callers
/// multi-start it for global coverage.
OptimResult lbfgs_minimize(const ObjectiveFn& fn, const Eigen::VectorXd& x0,
                           const BoxBounds& bounds, const LbfgsOptions& options);

/// Same, with the gradient supplied by finite differences of `f`
/// (central by default, one-sided when `forward` is set).
OptimResult lbfgs_minimize_fd(const std::function<double(const Eigen::VectorXd&)>& f,
                              const Eigen::VectorXd& x0, const BoxBounds& bounds,
                              const LbfgsOptions& options, double fd_step = 1e-6,
                              bool forward = false);

struct LmOptions {
  int max_iterations = 60;
  double cost_tol = 1e-12;   // relative cost decrease
  double step_tol = 1e-12;
  double lambda_init = 1e-3;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// Levenberg-Marquardt for 0.5*||r(x)||^2 with box bounds handled by step
/// clamping. Returns the best point visited.
OptimResult levenberg_marquardt(const ResidualFn& residual, const JacobianFn& jacobian,
                                const Eigen::VectorXd& x0, const BoxBounds& bounds,
                                const LmOptions& options);

}  // namespace safedoe::optim

#endif  // SAFEDOE_OPTIM_HPP
