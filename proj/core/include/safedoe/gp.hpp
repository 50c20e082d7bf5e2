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

#ifndef SAFEDOE_GP_HPP
#define SAFEDOE_GP_HPP

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>

#include "safedoe/kernels.hpp"

namespace safedoe::gp {

/// Prior mean function. An empty std::function means a zero prior.
using PriorMean = std::function<double(const Eigen::VectorXd&)>;

struct HyperFitConfig {
  int n_multistarts = 10;
  // Bounds on the log-hyperparameters, in units of the internally
  // standardized residuals (unit variance).
  double log_signal_lo = -9.2103403719761836;   // log(1e-4)
  double log_signal_hi = 6.9077552789821368;    // log(1e3)
  double log_lambda_lo = -9.2103403719761836;   // log(1e-4)
  double log_lambda_hi = 9.2103403719761836;    // log(1e4)
  double log_noise_lo = -23.025850929940457;    // log(1e-10)
  double log_noise_hi = 1.3862943611198906;     // log(4)
  /// When set, the noise variance (raw target units) is not fitted.
  std::optional<double> fixed_noise_variance;
  /// Extra multistart seeded from a previous fit (raw units).
  std::optional<KernelSpec> warm_start;
  int max_iterations = 40;
  std::uint64_t seed = 0;

  void validate(Eigen::Index dim) const;
};

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// Gaussian-process regressor with an optional parametric prior mean.
///
/// The model fits the residuals y - prior(x); the fitted constant offset of
/// those residuals is folded into the effective prior mean, so predictions
/// far from the data revert to prior_mean_value(). A fitted model is
/// immutable and safe to share across threads.
class GpModel {
 public:
  GpModel() = default;

  /// Maximum-marginal-likelihood fit over log-hyperparameters, best of
  /// cfg.n_multistarts local ascents started from a Latin hypercube.
  static GpModel fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     KernelFamily family, PriorMean prior_mean,
                     const HyperFitConfig& cfg);

  /// Build a model with known hyperparameters (no fitting, no target
  /// standardization). Used for oracles and replays.
  static GpModel with_hyperparameters(const Eigen::MatrixXd& X,
                                      const Eigen::VectorXd& y, KernelSpec spec,
                                      PriorMean prior_mean = {});

  bool fitted() const { return fitted_; }
  Eigen::Index size() const { return X_.rows(); }
  Eigen::Index dim() const { return X_.cols(); }

  Prediction predict(const Eigen::VectorXd& x) const;

  /// Gradient of the posterior mean with respect to x. The contribution of a
  /// non-trivial prior mean is taken by central differences.
  Eigen::VectorXd mean_grad(const Eigen::VectorXd& x) const;

  /// Gradient of the posterior variance with respect to x.
  Eigen::VectorXd var_grad(const Eigen::VectorXd& x) const;

  /// Hessian of the posterior variance with respect to x. Requires a kernel
  /// family that is twice differentiable at zero distance (SE or Matern52).
  Eigen::MatrixXd var_hess(const Eigen::VectorXd& x) const;

  /// Effective prior mean (user prior plus fitted residual offset).
  double prior_mean_value(const Eigen::VectorXd& x) const;

  const KernelSpec& kernel() const { return spec_; }
  double log_marginal_likelihood() const { return log_marginal_likelihood_; }
  double jitter() const { return jitter_; }
  const Eigen::MatrixXd& inputs() const { return X_; }
  const Eigen::VectorXd& targets() const { return y_; }

  /// Number of predictions whose variance was clamped up to zero.
  std::uint64_t negative_variance_clamps() const {
    return clamp_count_.load(std::memory_order_relaxed);
  }

  GpModel(const GpModel& other);
  GpModel& operator=(const GpModel& other);
  GpModel(GpModel&&) = default;
  GpModel& operator=(GpModel&&) = default;

 private:
  void finalize();
  void require_fitted() const;
  Eigen::MatrixXd cross_grad(const Eigen::VectorXd& x) const;  // n x d

  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
  PriorMean prior_;
  double mean_offset_ = 0.0;
  KernelSpec spec_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::MatrixXd inverse_;     // (K + s2 I)^-1, cached for variance ops
  Eigen::VectorXd alpha_;       // (K + s2 I)^-1 (y - prior(X) - offset)
  Eigen::VectorXd residuals_;   // y - prior(X) - offset
  double jitter_ = 0.0;
  double log_marginal_likelihood_ = 0.0;
  bool fitted_ = false;
  mutable std::atomic<std::uint64_t> clamp_count_{0};
};

/// Cholesky of K + noise*I with escalating jitter (relative to the mean
/// diagonal) from 1e-10 to 1e-6. Returns the jitter that succeeded; throws
/// Error(CholeskyFailure) if all levels fail.
double robust_cholesky(const Eigen::MatrixXd& gram_plus_noise,
                       Eigen::LLT<Eigen::MatrixXd>& out);

}  // namespace safedoe::gp

#endif  // SAFEDOE_GP_HPP
