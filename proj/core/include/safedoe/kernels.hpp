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

#ifndef SAFEDOE_KERNELS_HPP
#define SAFEDOE_KERNELS_HPP

#include <Eigen/Core>

namespace safedoe::gp {

enum class KernelFamily {
  SquaredExponential,
  Matern32,
  Matern52,
};

const char* kernel_family_name(KernelFamily family);
KernelFamily kernel_family_from_name(const std::string& name);

/// Stationary kernel k(x, x') = signal_variance * phi(r) with
/// r^2 = (x-x')^T Lambda (x-x'). Lambda holds inverse-squared lengthscales,
/// so a larger entry means faster decay along that input.
struct KernelSpec {
  KernelFamily family = KernelFamily::SquaredExponential;
  double signal_variance = 1.0;
  Eigen::VectorXd inv_sq_lengthscales;  // Lambda diagonal, all > 0
  double noise_variance = 0.0;

  Eigen::Index dim() const { return inv_sq_lengthscales.size(); }
  void validate() const;  // throws Error on a broken invariant
};

/// k(x, y). Symmetric in its arguments; equals signal_variance at x == y.
double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y);

/// d k(x, y) / d x.
Eigen::VectorXd kernel_grad_x(const KernelSpec& spec, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& y);

/// d k / d s at squared weighted distance s; grad_x k = 2 (dk/ds) Lambda (x-y).
double kernel_dk_ds(const KernelSpec& spec, double s);

/// d^2 k(x, y) / dx dx^T. Not defined for Matern32 at x == y.
Eigen::MatrixXd kernel_hess_x(const KernelSpec& spec, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& y);

/// Gram matrix K(X, X) without the noise term; X is n x d (rows are points).
Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const Eigen::MatrixXd& X);

/// Cross-covariance vector k(X, x), one entry per row of X.
Eigen::VectorXd cross_covariance(const KernelSpec& spec, const Eigen::MatrixXd& X,
                                 const Eigen::VectorXd& x);

}  // namespace safedoe::gp

#endif  // SAFEDOE_KERNELS_HPP
