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

#include "safedoe/estimation.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "safedoe/errors.hpp"
#include "safedoe/optim.hpp"
#include "safedoe/rng.hpp"
#include "safedoe/stats.hpp"

namespace safedoe::estimation {

namespace {

Eigen::VectorXd noise_std_floored(const Eigen::VectorXd& noise_std) {
  // A zero noise channel is legal in diagnostics mode; weight it like the
  // smallest positive channel (or unity) instead of dividing by zero.
  double smallest = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < noise_std.size(); ++i)
    if (noise_std[i] > 0.0) smallest = std::min(smallest, noise_std[i]);
  if (!std::isfinite(smallest)) smallest = 1e-8;
  Eigen::VectorXd sigma = noise_std;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (!(sigma[i] > 0.0)) sigma[i] = smallest;
  return sigma;
}

}  // namespace

bool FitReport::all_pass() const {
  if (!chi2_pass) return false;
  for (bool pass : t_pass)
    if (!pass) return false;
  return true;
}

Eigen::VectorXd weighted_residuals(const Eigen::VectorXd& theta,
                                   const std::vector<kinetics::Measurement>& data,
                                   const kinetics::KineticModel& model,
                                   const Eigen::VectorXd& noise_std,
                                   int integrator_steps) {
  const Eigen::VectorXd sigma = noise_std_floored(noise_std);
  const Eigen::Index n_out = sigma.size();
  Eigen::VectorXd r(static_cast<Eigen::Index>(data.size()) * n_out);
  Eigen::Index row = 0;
  for (const kinetics::Measurement& m : data) {
    const Eigen::VectorXd y_hat = kinetics::integrate(model, m.u, theta, integrator_steps);
    r.segment(row, n_out) = (y_hat - m.y).cwiseQuotient(sigma);
    row += n_out;
  }
  return r;
}

MleResult mle_fit(const std::vector<kinetics::Measurement>& data,
                  const kinetics::KineticModel& model,
                  const Eigen::VectorXd& noise_std, const MleOptions& options) {
  if (data.empty())
    throw Error(ErrorCode::InvalidArgument, "mle_fit: no experiments available");
  if (options.theta_lo.size() != model.n_params ||
      options.theta_hi.size() != model.n_params)
    throw Error(ErrorCode::DimensionMismatch, "mle_fit: bound size != parameter count");

  const Eigen::Index n_params = model.n_params;
  const Eigen::Index n_obs = static_cast<Eigen::Index>(data.size()) * noise_std.size();
  optim::BoxBounds bounds{options.theta_lo, options.theta_hi};

  // Extreme starts can blow up the fixed-step integration; such points get a
  // prohibitive cost instead of aborting the fit.
  // The sentinel dwarfs any stable weighted residual regardless of the
  // noise scaling, so unstable parameter regions always lose.
  constexpr double kUnstable = 1e150;
  optim::ResidualFn residual = [&](const Eigen::VectorXd& theta) -> Eigen::VectorXd {
    try {
      return weighted_residuals(theta, data, model, noise_std);
    } catch (const Error&) {
      return Eigen::VectorXd::Constant(n_obs, kUnstable);
    }
  };
  optim::JacobianFn jacobian = [&](const Eigen::VectorXd& theta) {
    const Eigen::VectorXd base = residual(theta);
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(base.size(), theta.size());
    if (base.lpNorm<Eigen::Infinity>() >= kUnstable) return jac;  // unstable region
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      double h = 1e-6 * std::abs(theta[j]);
      if (h == 0.0) h = 1e-6;
      Eigen::VectorXd theta_p = theta;
      theta_p[j] += h;
      jac.col(j) = (residual(theta_p) - base) / h;
    }
    return jac;
  };

  // Start points: optional warm start, then a log-uniform (pre-exponentials)
  // by uniform (activation energies) scatter. Parameters alternate k0, Ea.
  std::vector<Eigen::VectorXd> starts;
  if (options.warm_start) starts.push_back(bounds.clamp(*options.warm_start));
  rng::Stream stream(options.seed, "mle-starts");
  while (static_cast<int>(starts.size()) < options.n_multistarts) {
    Eigen::VectorXd theta0(n_params);
    for (Eigen::Index j = 0; j < n_params; ++j) {
      const bool is_prefactor = (j % 2 == 0);
      if (is_prefactor && options.theta_lo[j] > 0.0) {
        const double lo = std::log(options.theta_lo[j]);
        const double hi = std::log(options.theta_hi[j]);
        theta0[j] = std::exp(stream.uniform(lo, hi));
      } else {
        theta0[j] = stream.uniform(options.theta_lo[j], options.theta_hi[j]);
      }
    }
    starts.push_back(theta0);
  }

  optim::LmOptions lm;
  lm.max_iterations = std::min(options.exploration_max_iterations, options.max_iterations);

  MleResult best;
  best.cost = std::numeric_limits<double>::infinity();
  for (const Eigen::VectorXd& start : starts) {
    const optim::OptimResult r = optim::levenberg_marquardt(residual, jacobian, start, bounds, lm);
    if (r.value < best.cost) {
      best.cost = r.value;
      best.theta = r.x;
      best.converged = r.converged;
    }
  }
  // Polish the winner with a fresh damping schedule; the pre-exponential /
  // activation-energy valley is slow from distant starts.
  {
    optim::LmOptions polish;
    polish.max_iterations = 2 * options.max_iterations;
    const optim::OptimResult r =
        optim::levenberg_marquardt(residual, jacobian, best.theta, bounds, polish);
    if (r.value < best.cost) {
      best.cost = r.value;
      best.theta = r.x;
      best.converged = r.converged;
    }
  }
  // LM can stall on an active bound face; a projected quasi-Newton pass
  // optimizes within the face.
  {
    optim::ObjectiveFn fn = [&](const Eigen::VectorXd& theta, Eigen::VectorXd* grad) {
      const Eigen::VectorXd r = residual(theta);
      if (grad != nullptr) *grad = jacobian(theta).transpose() * r;
      return 0.5 * r.squaredNorm();
    };
    optim::LbfgsOptions face;
    face.max_iterations = 150;
    face.grad_tol = 1e-10;
    const optim::OptimResult r = optim::lbfgs_minimize(fn, best.theta, bounds, face);
    if (r.value < best.cost) {
      best.cost = r.value;
      best.theta = r.x;
      best.converged = true;
    }
  }
  if (!best.theta.size() || !std::isfinite(best.cost) || best.cost >= 1e290)
    throw Error(ErrorCode::OptimizationFailure,
                "mle_fit: no start converged to a stable parameter set");

  best.underdetermined = n_obs < n_params;
  return best;
}

PosteriorGaussian laplace_posterior(const Eigen::VectorXd& theta,
                                    const std::vector<kinetics::Measurement>& data,
                                    const kinetics::KineticModel& model,
                                    const Eigen::VectorXd& noise_std,
                                    int integrator_steps) {
  const Eigen::VectorXd sigma = noise_std_floored(noise_std);
  const Eigen::Index n_params = theta.size();
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(n_params, n_params);
  for (const kinetics::Measurement& m : data) {
    Eigen::MatrixXd jac = kinetics::sensitivities(model, m.u, theta, integrator_steps);
    jac.array().colwise() /= sigma.array();
    info += jac.transpose() * jac;
  }
  info = 0.5 * (info + info.transpose()).eval();

  PosteriorGaussian posterior;
  posterior.mean = theta;
  posterior.dof = static_cast<int>(static_cast<Eigen::Index>(data.size()) * sigma.size() -
                                   n_params);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(info);
  const Eigen::VectorXd& values = eigen.eigenvalues();
  const double floor = 1e-12 * std::max(info.trace(), 0.0) / static_cast<double>(n_params);
  Eigen::VectorXd inv_values(n_params);
  for (Eigen::Index i = 0; i < n_params; ++i) {
    if (values[i] > floor && values[i] > 0.0) {
      inv_values[i] = 1.0 / values[i];
    } else {
      // Singular or near-singular direction: floored pseudo-inverse.
      posterior.pseudo_inverse_used = true;
      inv_values[i] = floor > 0.0 ? 1.0 / floor : 0.0;
    }
  }
  posterior.covariance =
      eigen.eigenvectors() * inv_values.asDiagonal() * eigen.eigenvectors().transpose();
  posterior.covariance =
      0.5 * (posterior.covariance + posterior.covariance.transpose()).eval();
  return posterior;
}

FitReport statistics(const Eigen::VectorXd& theta, const PosteriorGaussian& posterior,
                     const std::vector<kinetics::Measurement>& data,
                     const kinetics::KineticModel& model,
                     const Eigen::VectorXd& noise_std, double alpha,
                     int integrator_steps) {
  const Eigen::Index n_obs = static_cast<Eigen::Index>(data.size()) * noise_std.size();
  const int dof = static_cast<int>(n_obs - theta.size());
  if (dof < 1)
    throw Error(ErrorCode::DegreesOfFreedom,
                "statistics: N_y - N_theta = " + std::to_string(dof) + " must be >= 1");

  FitReport report;
  report.theta = theta;
  report.covariance_diagonal = posterior.covariance.diagonal();
  report.dof = dof;
  report.alpha = alpha;

  const Eigen::VectorXd r = weighted_residuals(theta, data, model, noise_std, integrator_steps);
  report.chi2_sample = r.squaredNorm();
  report.chi2_ref = stats::chi_squared_quantile(1.0 - alpha, dof);
  report.chi2_pass = report.chi2_sample < report.chi2_ref;

  // Two-sided convention: t_ref(1 - alpha/2) both inside t_j and as the
  // pass threshold.
  report.t_ref = stats::student_t_quantile(1.0 - alpha / 2.0, dof);
  report.t_values.resize(theta.size());
  report.t_pass.resize(static_cast<std::size_t>(theta.size()));
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    const double sd = std::sqrt(std::max(report.covariance_diagonal[j], 0.0));
    report.t_values[j] = sd > 0.0 ? theta[j] / (sd * report.t_ref)
                                  : std::numeric_limits<double>::infinity();
    report.t_pass[static_cast<std::size_t>(j)] = report.t_values[j] > report.t_ref;
  }
  return report;
}

}  // namespace safedoe::estimation
