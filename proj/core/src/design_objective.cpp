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

#include "safedoe/design_objective.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>

#include "safedoe/errors.hpp"
#include "safedoe/rng.hpp"

namespace safedoe::design {

FimSpec FimSpec::from_noise(const Eigen::VectorXd& noise_std, Eigen::Index n_params) {
  FimSpec spec;
  spec.sigma_exp_inv_diag.resize(noise_std.size());
  double smallest = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < noise_std.size(); ++i)
    if (noise_std[i] > 0.0) smallest = std::min(smallest, noise_std[i]);
  if (!std::isfinite(smallest)) smallest = 1e-8;
  for (Eigen::Index i = 0; i < noise_std.size(); ++i) {
    const double sd = noise_std[i] > 0.0 ? noise_std[i] : smallest;
    spec.sigma_exp_inv_diag[i] = 1.0 / (sd * sd);
  }
  spec.prior_information = Eigen::MatrixXd::Zero(n_params, n_params);
  return spec;
}

Eigen::MatrixXd fim(const kinetics::KineticModel& model, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& theta, const FimSpec& spec,
                    int integrator_steps) {
  const Eigen::MatrixXd jac = kinetics::sensitivities(model, u, theta, integrator_steps);
  Eigen::MatrixXd info = jac.transpose() * spec.sigma_exp_inv_diag.asDiagonal() * jac;
  if (spec.prior_information.size() > 0) info += spec.prior_information;
  return 0.5 * (info + info.transpose()).eval();
}

double d_metric(const Eigen::MatrixXd& fim_matrix) {
  const Eigen::Index n = fim_matrix.rows();
  const double eps = 1e-10 * std::max(fim_matrix.trace(), 0.0) / static_cast<double>(n);
  Eigen::MatrixXd a = fim_matrix;
  a.diagonal().array() += eps;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    log_det += std::log(std::max(ldlt.vectorD()[i], 1e-300));
  return -log_det;
}

Eigen::VectorXd ObjectiveSurrogate::normalize_u(const Eigen::VectorXd& u) const {
  return u_bounds_.normalize(u);
}

Eigen::VectorXd ObjectiveSurrogate::normalize_theta(const Eigen::VectorXd& theta) const {
  return (2.0 * (theta - theta_box_lo_).array() /
              (theta_box_hi_ - theta_box_lo_).array() -
          1.0)
      .matrix();
}

ObjectiveSurrogate ObjectiveSurrogate::train(const kinetics::KineticModel& model,
                                             const kinetics::DesignBounds& u_bounds,
                                             const estimation::PosteriorGaussian& posterior,
                                             const Eigen::VectorXd& theta_lo,
                                             const Eigen::VectorXd& theta_hi,
                                             const FimSpec& spec,
                                             const SurrogateConfig& cfg) {
  const Eigen::Index n_u = u_bounds.dim();
  const Eigen::Index n_theta = posterior.mean.size();
  if (cfg.n_points < 2)
    throw Error(ErrorCode::InvalidArgument, "surrogate training needs >= 2 points");

  ObjectiveSurrogate surrogate;
  surrogate.u_bounds_ = u_bounds;
  surrogate.n_u_ = n_u;
  surrogate.n_theta_ = n_theta;

  // Training theta box: mean +/- 3 sigma, clipped to the estimation bounds,
  // with a floor so degenerate posteriors still give a usable box.
  surrogate.theta_box_lo_.resize(n_theta);
  surrogate.theta_box_hi_.resize(n_theta);
  for (Eigen::Index j = 0; j < n_theta; ++j) {
    const double sd = std::sqrt(std::max(posterior.covariance(j, j), 0.0));
    const double half = std::max(3.0 * sd, 1e-6 * (1.0 + std::abs(posterior.mean[j])));
    surrogate.theta_box_lo_[j] = std::max(posterior.mean[j] - half, theta_lo[j]);
    surrogate.theta_box_hi_[j] = std::min(posterior.mean[j] + half, theta_hi[j]);
    if (!(surrogate.theta_box_hi_[j] > surrogate.theta_box_lo_[j])) {
      surrogate.theta_box_lo_[j] = theta_lo[j];
      surrogate.theta_box_hi_[j] = theta_hi[j];
    }
  }

  Eigen::VectorXd lo(n_u + n_theta), hi(n_u + n_theta);
  lo.head(n_u) = u_bounds.lo;
  hi.head(n_u) = u_bounds.hi;
  lo.tail(n_theta) = surrogate.theta_box_lo_;
  hi.tail(n_theta) = surrogate.theta_box_hi_;

  rng::Stream stream(cfg.seed, "lhs");
  Eigen::MatrixXd samples = rng::latin_hypercube(cfg.n_points, lo, hi, stream);

  Eigen::MatrixXd normalized(cfg.n_points, n_u + n_theta);
  Eigen::VectorXd values(cfg.n_points);
  for (int i = 0; i < cfg.n_points; ++i) {
    Eigen::VectorXd sample = samples.row(i).transpose();
    bool ok = false;
    for (int attempt = 0; attempt < 16 && !ok; ++attempt) {
      try {
        const Eigen::MatrixXd information =
            fim(model, sample.head(n_u), sample.tail(n_theta), spec, cfg.integrator_steps);
        values[i] = d_metric(information);
        ok = std::isfinite(values[i]);
      } catch (const Error&) {
        ok = false;
      }
      if (!ok) {
        ++surrogate.resampled_;
        for (Eigen::Index j = 0; j < sample.size(); ++j)
          sample[j] = stream.uniform(lo[j], hi[j]);
      }
    }
    if (!ok)
      throw Error(ErrorCode::IntegrationFailure,
                  "surrogate training: objective evaluation kept failing after resampling");
    samples.row(i) = sample.transpose();
    normalized.row(i).head(n_u) = surrogate.normalize_u(sample.head(n_u)).transpose();
    normalized.row(i).tail(n_theta) =
        surrogate.normalize_theta(sample.tail(n_theta)).transpose();
  }

  gp::HyperFitConfig gp_cfg;
  gp_cfg.n_multistarts = cfg.gp_multistarts;
  gp_cfg.max_iterations = cfg.gp_max_iterations;
  gp_cfg.seed = cfg.seed;
  gp_cfg.warm_start = cfg.warm_start;
  surrogate.gp_ = gp::GpModel::fit(normalized, values, cfg.family, {}, gp_cfg);
  surrogate.train_physical_ = samples;
  surrogate.train_values_ = values;
  return surrogate;
}

ObjectiveSurrogate::Moments ObjectiveSurrogate::predict(const Eigen::VectorXd& u,
                                                        const Eigen::VectorXd& theta) const {
  Eigen::VectorXd z(n_u_ + n_theta_);
  z.head(n_u_) = normalize_u(u);
  z.tail(n_theta_) = normalize_theta(theta);
  const gp::Prediction p = gp_.predict(z);
  return {p.mean, p.variance};
}

GaussianMoments propagate_gaussian_input(const gp::GpModel& model,
                                         const Eigen::VectorXd& mu,
                                         const Eigen::MatrixXd& sigma_active,
                                         const std::vector<Eigen::Index>& active,
                                         double fd_step) {
  const Eigen::Index n_active = static_cast<Eigen::Index>(active.size());
  if (sigma_active.rows() != n_active || sigma_active.cols() != n_active)
    throw Error(ErrorCode::DimensionMismatch,
                "propagate_gaussian_input: covariance/active size mismatch");
  const gp::Prediction p = model.predict(mu);
  if (n_active == 0 || sigma_active.isZero(0.0)) return {p.mean, p.variance};

  Eigen::VectorXd mean_grad(n_active);
  {
    const Eigen::VectorXd full = model.mean_grad(mu);
    for (Eigen::Index j = 0; j < n_active; ++j) mean_grad[j] = full[active[j]];
  }
  const double gradient_term = mean_grad.dot(sigma_active * mean_grad);

  Eigen::MatrixXd hess(n_active, n_active);
  for (Eigen::Index j = 0; j < n_active; ++j) {
    Eigen::VectorXd zp = mu, zm = mu;
    zp[active[j]] += fd_step;
    zm[active[j]] -= fd_step;
    const Eigen::VectorXd gp_grad = model.var_grad(zp);
    const Eigen::VectorXd gm_grad = model.var_grad(zm);
    for (Eigen::Index i = 0; i < n_active; ++i)
      hess(i, j) = (gp_grad[active[i]] - gm_grad[active[i]]) / (2.0 * fd_step);
  }
  hess = 0.5 * (hess + hess.transpose()).eval();
  const double trace_term = 0.5 * (hess * sigma_active).trace();

  GaussianMoments out;
  out.mean = p.mean;
  out.variance = std::max(p.variance + trace_term + gradient_term, 0.0);
  return out;
}

ObjectiveSurrogate::Moments ObjectiveSurrogate::propagate(
    const Eigen::VectorXd& u, const Eigen::VectorXd& mu_theta,
    const Eigen::MatrixXd& sigma_theta) const {
  if (mu_theta.size() != n_theta_ || sigma_theta.rows() != n_theta_ ||
      sigma_theta.cols() != n_theta_)
    throw Error(ErrorCode::DimensionMismatch, "propagate: theta dimension mismatch");

  Eigen::VectorXd z(n_u_ + n_theta_);
  z.head(n_u_) = normalize_u(u);
  z.tail(n_theta_) = normalize_theta(mu_theta);

  // Covariance in normalized theta coordinates: theta_n = S(theta - c), so
  // Sigma_n = S Sigma S with S = diag(2 / width). The quadratic and trace
  // forms are invariant under this consistent change of variables.
  Eigen::VectorXd scale(n_theta_);
  for (Eigen::Index j = 0; j < n_theta_; ++j)
    scale[j] = 2.0 / (theta_box_hi_[j] - theta_box_lo_[j]);
  const Eigen::MatrixXd sigma_n = scale.asDiagonal() * sigma_theta * scale.asDiagonal();

  std::vector<Eigen::Index> active;
  active.reserve(static_cast<std::size_t>(n_theta_));
  for (Eigen::Index j = 0; j < n_theta_; ++j) active.push_back(n_u_ + j);

  // Step: 1e-4 of the normalized theta-box width of 2.
  const GaussianMoments moments =
      propagate_gaussian_input(gp_, z, sigma_n, active, 1e-4 * 2.0);
  return {moments.mean, moments.variance};
}

double ObjectiveSurrogate::lower_confidence(const Eigen::VectorXd& u,
                                            const Eigen::VectorXd& mu_theta,
                                            const Eigen::MatrixXd& sigma_theta,
                                            double alpha_j) const {
  const Moments m = propagate(u, mu_theta, sigma_theta);
  return m.mean - alpha_j * std::sqrt(std::max(m.variance, 0.0));
}

void ObjectiveSurrogate::dump_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  for (Eigen::Index j = 0; j < n_u_; ++j) out << "u" << j + 1 << ",";
  for (Eigen::Index j = 0; j < n_theta_; ++j) out << "theta" << j + 1 << ",";
  out << "J\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < train_physical_.rows(); ++i) {
    for (Eigen::Index j = 0; j < train_physical_.cols(); ++j)
      out << train_physical_(i, j) << ",";
    out << train_values_[i] << "\n";
  }
}

}  // namespace safedoe::design
