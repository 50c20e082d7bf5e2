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

#ifndef SAFEDOE_DESIGN_OBJECTIVE_HPP
#define SAFEDOE_DESIGN_OBJECTIVE_HPP

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "safedoe/estimation.hpp"
#include "safedoe/gp.hpp"
#include "safedoe/kinetics.hpp"

namespace safedoe::design {

/// Weighting and prior information for the Fisher information matrix.
struct FimSpec {
  Eigen::VectorXd sigma_exp_inv_diag;   // 1 / sigma_i^2 per output
  Eigen::MatrixXd prior_information;    // M0, PSD; accumulates over a campaign

  static FimSpec from_noise(const Eigen::VectorXd& noise_std, Eigen::Index n_params);
};

/// J^T Sigma_exp J + M0, symmetrized. J are the outlet sensitivities.
Eigen::MatrixXd fim(const kinetics::KineticModel& model, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& theta, const FimSpec& spec,
                    int integrator_steps = 200);

/// D-optimality loss: -log det(FIM + eps I) with eps = 1e-10 trace / n.
/// Lower is better.
double d_metric(const Eigen::MatrixXd& fim_matrix);

struct GaussianMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Moments of a GP posterior under a Gaussian input on the coordinates in
/// `active` (the rest held fixed at mu):
///   mean = m(mu)
///   var  = Sigma(mu) + 0.5 tr(H Sigma_in) + grad^T Sigma_in grad
/// with grad the posterior-mean gradient and H the posterior-variance
/// Hessian over the active block, taken by central differences of the
/// analytic gradient with step `fd_step`. Variance is floored at zero.
GaussianMoments propagate_gaussian_input(const gp::GpModel& model,
                                         const Eigen::VectorXd& mu,
                                         const Eigen::MatrixXd& sigma_active,
                                         const std::vector<Eigen::Index>& active,
                                         double fd_step);

struct SurrogateConfig {
  int n_points = 200;
  gp::KernelFamily family = gp::KernelFamily::Matern52;
  int gp_multistarts = 10;
  int gp_max_iterations = 40;
  std::uint64_t seed = 0;
  std::optional<gp::KernelSpec> warm_start;  // previous iteration's kernel
  int integrator_steps = 200;
};

/// GP surrogate of the D-optimality loss over (u, theta), trained on
/// in-silico evaluations of the approximate model, with first/second-order
/// marginalization of the parameter uncertainty.
///
/// Inputs are normalized internally: u to its design box, theta to the
/// mean +/- 3 sigma training box (clipped to the estimation bounds).
class ObjectiveSurrogate {
 public:
  /// Latin-hypercube sample of n_points over u-bounds x theta-box, loss
  /// evaluated per sample, GP fitted on the values with a zero prior mean.
  /// Samples whose integration fails are resampled (and counted).
  static ObjectiveSurrogate train(const kinetics::KineticModel& model,
                                  const kinetics::DesignBounds& u_bounds,
                                  const estimation::PosteriorGaussian& posterior,
                                  const Eigen::VectorXd& theta_lo,
                                  const Eigen::VectorXd& theta_hi, const FimSpec& spec,
                                  const SurrogateConfig& cfg);

  struct Moments {
    double mean = 0.0;
    double variance = 0.0;
  };

  /// Plain GP prediction at (u, theta), both physical.
  Moments predict(const Eigen::VectorXd& u, const Eigen::VectorXd& theta) const;

  /// Gaussian marginalization of theta ~ N(mu, Sigma) at deterministic u:
  /// mean  = m(u, mu)
  /// var   = Sigma(u, mu) + 0.5 tr(d2Sigma/dtheta2 * Sigma_theta)
  ///         + dm/dtheta^T Sigma_theta dm/dtheta
  /// with the variance Hessian taken by central differences of the analytic
  /// gradient over the theta block. The result is floored at zero.
  Moments propagate(const Eigen::VectorXd& u, const Eigen::VectorXd& mu_theta,
                    const Eigen::MatrixXd& sigma_theta) const;

  /// Lower-confidence objective used by the design solve.
  double lower_confidence(const Eigen::VectorXd& u, const Eigen::VectorXd& mu_theta,
                          const Eigen::MatrixXd& sigma_theta, double alpha_j) const;

  const gp::GpModel& model() const { return gp_; }
  int resampled() const { return resampled_; }
  const Eigen::MatrixXd& training_inputs_physical() const { return train_physical_; }
  const Eigen::VectorXd& training_values() const { return train_values_; }

  /// Audit dump: columns u..., theta..., J.
  void dump_csv(const std::string& path) const;

 private:
  Eigen::VectorXd normalize_u(const Eigen::VectorXd& u) const;
  Eigen::VectorXd normalize_theta(const Eigen::VectorXd& theta) const;

  gp::GpModel gp_;
  kinetics::DesignBounds u_bounds_;
  Eigen::VectorXd theta_box_lo_, theta_box_hi_;
  Eigen::Index n_u_ = 0, n_theta_ = 0;
  Eigen::MatrixXd train_physical_;
  Eigen::VectorXd train_values_;
  int resampled_ = 0;
};

}  // namespace safedoe::design

#endif  // SAFEDOE_DESIGN_OBJECTIVE_HPP
