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

#include "safedoe/gp.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "safedoe/errors.hpp"
#include "safedoe/optim.hpp"
#include "safedoe/rng.hpp"

namespace safedoe::gp {

namespace {

Eigen::VectorXd evaluate_prior(const PriorMean& prior, const Eigen::MatrixXd& X) {
  Eigen::VectorXd values = Eigen::VectorXd::Zero(X.rows());
  if (prior) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) values[i] = prior(X.row(i).transpose());
  }
  return values;
}

// Marginal-likelihood state shared across multistarts: pairwise squared
// differences per input dimension, computed once.
struct FitWorkspace {
  const Eigen::MatrixXd& X;
  const Eigen::VectorXd& z;  // standardized residuals
  KernelFamily family;
  std::vector<Eigen::MatrixXd> sq_diff;  // one n x n matrix per dimension
  bool fit_noise;
  double fixed_noise_std = 0.0;  // standardized, when !fit_noise

  FitWorkspace(const Eigen::MatrixXd& X_in, const Eigen::VectorXd& z_in,
               KernelFamily family_in)
      : X(X_in), z(z_in), family(family_in) {
    const Eigen::Index n = X.rows(), d = X.cols();
    sq_diff.reserve(static_cast<std::size_t>(d));
    for (Eigen::Index l = 0; l < d; ++l) {
      Eigen::MatrixXd m(n, n);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
          const double diff = X(i, l) - X(j, l);
          m(i, j) = diff * diff;
        }
      sq_diff.push_back(std::move(m));
    }
  }
};

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt5 = 2.23606797749979;

// Negative log marginal likelihood of standardized residuals and, when
// requested, its gradient w.r.t. p = [log sa2, log lambda_1.., (log s2)].
double negative_log_ml(const FitWorkspace& ws, const Eigen::VectorXd& p,
                       Eigen::VectorXd* grad) {
  const Eigen::Index n = ws.X.rows(), d = ws.X.cols();
  const double sa2 = std::exp(p[0]);
  Eigen::VectorXd lambda(d);
  for (Eigen::Index l = 0; l < d; ++l) lambda[l] = std::exp(p[1 + l]);
  const double s2 = ws.fit_noise ? std::exp(p[1 + d]) : ws.fixed_noise_std;

  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index l = 0; l < d; ++l) s += lambda[l] * ws.sq_diff[static_cast<std::size_t>(l)];

  // The exponentials dominate this evaluation; fill one triangle only.
  Eigen::MatrixXd corr(n, n);  // phi(r)
  Eigen::MatrixXd rmat;        // only needed for Matern families
  if (ws.family != KernelFamily::SquaredExponential) rmat.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      double value = 0.0;
      switch (ws.family) {
        case KernelFamily::SquaredExponential:
          value = std::exp(-0.5 * s(i, j));
          break;
        case KernelFamily::Matern32: {
          const double r = std::sqrt(s(i, j));
          rmat(i, j) = r;
          rmat(j, i) = r;
          value = (1.0 + kSqrt3 * r) * std::exp(-kSqrt3 * r);
          break;
        }
        case KernelFamily::Matern52: {
          const double r = std::sqrt(s(i, j));
          rmat(i, j) = r;
          rmat(j, i) = r;
          value = (1.0 + kSqrt5 * r + (5.0 / 3.0) * s(i, j)) * std::exp(-kSqrt5 * r);
          break;
        }
      }
      corr(i, j) = value;
      corr(j, i) = value;
    }
  }

  Eigen::MatrixXd a = sa2 * corr;
  a.diagonal().array() += s2 + 1e-12 * sa2;  // fixed conditioning floor

  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();

  const Eigen::VectorXd alpha = llt.solve(ws.z);
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) logdet += std::log(llt.matrixLLT()(i, i));
  logdet *= 2.0;
  const double nll = 0.5 * ws.z.dot(alpha) + 0.5 * logdet +
                     0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  if (grad == nullptr) return nll;

  // d nll / d theta_j = -0.5 tr((alpha alpha^T - A^-1) dA/dtheta_j)
  Eigen::MatrixXd a_inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  Eigen::MatrixXd w = alpha * alpha.transpose() - a_inv;

  grad->resize(p.size());
  // dA/dlog sa2 = sa2 * corr (the noise-free part).
  (*grad)[0] = -0.5 * (w.array() * (sa2 * corr.array())).sum();

  // dk/dlog lambda_l = c(s) * sq_diff_l * lambda_l with c depending on family.
  // Recovered from corr so no further exponentials are needed.
  Eigen::MatrixXd cfac(n, n);
  switch (ws.family) {
    case KernelFamily::SquaredExponential:
      cfac = (-0.5 * sa2 * corr.array()).matrix();
      break;
    case KernelFamily::Matern32:
      cfac = (-1.5 * sa2 * corr.array() / (1.0 + kSqrt3 * rmat.array())).matrix();
      break;
    case KernelFamily::Matern52:
      cfac = (-(5.0 / 6.0) * sa2 * (1.0 + kSqrt5 * rmat.array()) * corr.array() /
              (1.0 + kSqrt5 * rmat.array() + (5.0 / 3.0) * s.array()))
                 .matrix();
      break;
  }
  for (Eigen::Index l = 0; l < d; ++l) {
    const Eigen::ArrayXXd dk =
        cfac.array() * ws.sq_diff[static_cast<std::size_t>(l)].array() * lambda[l];
    (*grad)[1 + l] = -0.5 * (w.array() * dk).sum();
  }
  if (ws.fit_noise) (*grad)[1 + d] = -0.5 * s2 * w.trace();
  return nll;
}

}  // namespace

void HyperFitConfig::validate(Eigen::Index) const {
  if (n_multistarts < 1)
    throw Error(ErrorCode::InvalidArgument, "HyperFitConfig.n_multistarts must be >= 1");
  const double bounds[] = {log_signal_lo, log_signal_hi, log_lambda_lo,
                           log_lambda_hi, log_noise_lo, log_noise_hi};
  for (double b : bounds)
    if (!std::isfinite(b))
      throw Error(ErrorCode::InvalidArgument, "HyperFitConfig bounds must be finite");
  if (fixed_noise_variance && !(*fixed_noise_variance >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "fixed noise variance must be >= 0");
}

double robust_cholesky(const Eigen::MatrixXd& gram_plus_noise,
                       Eigen::LLT<Eigen::MatrixXd>& out) {
  const double mean_diag = gram_plus_noise.diagonal().mean();
  double jitter = 0.0;
  for (int attempt = 0; attempt < 6; ++attempt) {
    Eigen::MatrixXd a = gram_plus_noise;
    if (attempt > 0) {
      jitter = mean_diag * 1e-10 * std::pow(10.0, attempt - 1);
      a.diagonal().array() += jitter;
    }
    out.compute(a);
    if (out.info() == Eigen::Success) return jitter;
  }
  throw Error(ErrorCode::CholeskyFailure,
              "Gram matrix is not positive definite even with jitter 1e-6 of the "
              "mean diagonal; inputs may be duplicated or lengthscales degenerate");
}

GpModel::GpModel(const GpModel& other)
    : X_(other.X_),
      y_(other.y_),
      prior_(other.prior_),
      mean_offset_(other.mean_offset_),
      spec_(other.spec_),
      chol_(other.chol_),
      inverse_(other.inverse_),
      alpha_(other.alpha_),
      residuals_(other.residuals_),
      jitter_(other.jitter_),
      log_marginal_likelihood_(other.log_marginal_likelihood_),
      fitted_(other.fitted_),
      clamp_count_(other.clamp_count_.load(std::memory_order_relaxed)) {}

GpModel& GpModel::operator=(const GpModel& other) {
  if (this == &other) return *this;
  X_ = other.X_;
  y_ = other.y_;
  prior_ = other.prior_;
  mean_offset_ = other.mean_offset_;
  spec_ = other.spec_;
  chol_ = other.chol_;
  inverse_ = other.inverse_;
  alpha_ = other.alpha_;
  residuals_ = other.residuals_;
  jitter_ = other.jitter_;
  log_marginal_likelihood_ = other.log_marginal_likelihood_;
  fitted_ = other.fitted_;
  clamp_count_.store(other.clamp_count_.load(std::memory_order_relaxed),
                     std::memory_order_relaxed);
  return *this;
}

void GpModel::finalize() {
  const Eigen::VectorXd prior_values = evaluate_prior(prior_, X_);
  residuals_ = y_ - prior_values;
  residuals_.array() -= mean_offset_;
  Eigen::MatrixXd a = gram_matrix(spec_, X_);
  a.diagonal().array() += spec_.noise_variance;
  jitter_ = robust_cholesky(a, chol_);
  inverse_ = chol_.solve(Eigen::MatrixXd::Identity(X_.rows(), X_.rows()));
  alpha_ = chol_.solve(residuals_);

  double logdet = 0.0;
  for (Eigen::Index i = 0; i < X_.rows(); ++i)
    logdet += std::log(chol_.matrixLLT()(i, i));
  log_marginal_likelihood_ =
      -0.5 * residuals_.dot(alpha_) - logdet -
      0.5 * static_cast<double>(X_.rows()) * std::log(2.0 * std::numbers::pi);
  fitted_ = true;
}

GpModel GpModel::with_hyperparameters(const Eigen::MatrixXd& X,
                                      const Eigen::VectorXd& y, KernelSpec spec,
                                      PriorMean prior_mean) {
  if (X.rows() != y.size())
    throw Error(ErrorCode::DimensionMismatch, "GpModel: |X| != |y|");
  if (X.cols() != spec.dim())
    throw Error(ErrorCode::DimensionMismatch, "GpModel: kernel dimension != input dimension");
  spec.validate();
  GpModel model;
  model.X_ = X;
  model.y_ = y;
  model.prior_ = std::move(prior_mean);
  model.spec_ = std::move(spec);
  model.mean_offset_ = 0.0;
  model.finalize();
  return model;
}

GpModel GpModel::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     KernelFamily family, PriorMean prior_mean,
                     const HyperFitConfig& cfg) {
  if (X.rows() != y.size())
    throw Error(ErrorCode::DimensionMismatch, "gp_fit: |X| != |y|");
  if (X.rows() < 2)
    throw Error(ErrorCode::InvalidArgument, "gp_fit: need at least 2 points");
  cfg.validate(X.cols());

  const Eigen::Index n = X.rows(), d = X.cols();
  const Eigen::VectorXd prior_values = evaluate_prior(prior_mean, X);
  Eigen::VectorXd residuals = y - prior_values;
  const double offset = residuals.mean();
  residuals.array() -= offset;
  double scale = std::sqrt(residuals.squaredNorm() / static_cast<double>(n));
  if (!(scale > 1e-12)) scale = 1e-12;
  const Eigen::VectorXd z = residuals / scale;

  FitWorkspace ws(X, z, family);
  ws.fit_noise = !cfg.fixed_noise_variance.has_value();
  if (!ws.fit_noise)
    ws.fixed_noise_std = *cfg.fixed_noise_variance / (scale * scale);

  const Eigen::Index n_params = 1 + d + (ws.fit_noise ? 1 : 0);
  optim::BoxBounds bounds;
  bounds.lo.resize(n_params);
  bounds.hi.resize(n_params);
  bounds.lo[0] = cfg.log_signal_lo;
  bounds.hi[0] = cfg.log_signal_hi;
  for (Eigen::Index l = 0; l < d; ++l) {
    bounds.lo[1 + l] = cfg.log_lambda_lo;
    bounds.hi[1 + l] = cfg.log_lambda_hi;
  }
  if (ws.fit_noise) {
    bounds.lo[1 + d] = cfg.log_noise_lo;
    bounds.hi[1 + d] = cfg.log_noise_hi;
  }

  // Start list: data-driven heuristic, optional warm start, then a Latin
  // hypercube over the log-bound box.
  std::vector<Eigen::VectorXd> starts;
  {
    Eigen::VectorXd p0(n_params);
    p0[0] = 0.0;  // unit signal variance for unit-variance residuals
    for (Eigen::Index l = 0; l < d; ++l) {
      const double span = X.col(l).maxCoeff() - X.col(l).minCoeff();
      const double ell = span > 0.0 ? 0.5 * span : 1.0;
      p0[1 + l] = std::log(1.0 / (ell * ell));
    }
    if (ws.fit_noise) p0[1 + d] = std::log(1e-2);
    starts.push_back(bounds.clamp(p0));
  }
  if (cfg.warm_start && cfg.warm_start->dim() == d) {
    Eigen::VectorXd p(n_params);
    p[0] = std::log(std::max(cfg.warm_start->signal_variance / (scale * scale), 1e-300));
    for (Eigen::Index l = 0; l < d; ++l)
      p[1 + l] = std::log(cfg.warm_start->inv_sq_lengthscales[l]);
    if (ws.fit_noise)
      p[1 + d] = std::log(
          std::max(cfg.warm_start->noise_variance / (scale * scale), 1e-300));
    starts.push_back(bounds.clamp(p));
  }
  if (static_cast<int>(starts.size()) < cfg.n_multistarts) {
    rng::Stream stream(cfg.seed, "gp-hyper-lhs");
    const int extra = cfg.n_multistarts - static_cast<int>(starts.size());
    const Eigen::MatrixXd lhs = rng::latin_hypercube(extra, bounds.lo, bounds.hi, stream);
    for (int i = 0; i < extra; ++i) starts.push_back(lhs.row(i).transpose());
  }

  optim::ObjectiveFn objective = [&ws](const Eigen::VectorXd& p, Eigen::VectorXd* g) {
    return negative_log_ml(ws, p, g);
  };
  optim::LbfgsOptions opts;
  opts.max_iterations = cfg.max_iterations;
  opts.grad_tol = 1e-4;
  opts.value_tol = 1e-9;

  Eigen::VectorXd best_p = starts.front();
  double best_value = std::numeric_limits<double>::infinity();
  for (const Eigen::VectorXd& start : starts) {
    const optim::OptimResult r = optim::lbfgs_minimize(objective, start, bounds, opts);
    if (r.value < best_value) {
      best_value = r.value;
      best_p = r.x;
    }
  }
  if (!std::isfinite(best_value))
    throw Error(ErrorCode::CholeskyFailure,
                "gp_fit: no hyperparameter start yielded a well-conditioned Gram matrix");

  KernelSpec spec;
  spec.family = family;
  spec.signal_variance = std::exp(best_p[0]) * scale * scale;
  spec.inv_sq_lengthscales.resize(d);
  for (Eigen::Index l = 0; l < d; ++l)
    spec.inv_sq_lengthscales[l] = std::exp(best_p[1 + l]);
  spec.noise_variance = ws.fit_noise ? std::exp(best_p[1 + d]) * scale * scale
                                     : *cfg.fixed_noise_variance;

  GpModel model;
  model.X_ = X;
  model.y_ = y;
  model.prior_ = std::move(prior_mean);
  model.spec_ = std::move(spec);
  model.mean_offset_ = offset;
  model.finalize();
  return model;
}

void GpModel::require_fitted() const {
  if (!fitted_)
    throw Error(ErrorCode::NotFitted, "GpModel: predict called before fit");
}

double GpModel::prior_mean_value(const Eigen::VectorXd& x) const {
  return (prior_ ? prior_(x) : 0.0) + mean_offset_;
}

Prediction GpModel::predict(const Eigen::VectorXd& x) const {
  require_fitted();
  if (x.size() != dim())
    throw Error(ErrorCode::DimensionMismatch, "GpModel::predict: point dimension mismatch");
  const Eigen::VectorXd k_star = cross_covariance(spec_, X_, x);
  Prediction out;
  out.mean = prior_mean_value(x) + k_star.dot(alpha_);
  double variance = spec_.signal_variance - k_star.dot(inverse_ * k_star);
  if (variance < 0.0) {
    clamp_count_.fetch_add(1, std::memory_order_relaxed);
    variance = 0.0;
  }
  out.variance = variance;
  return out;
}

Eigen::MatrixXd GpModel::cross_grad(const Eigen::VectorXd& x) const {
  const Eigen::Index n = X_.rows(), d = dim();
  Eigen::MatrixXd j(n, d);
  Eigen::VectorXd weighted(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Eigen::Index l = 0; l < d; ++l) {
      const double diff = x[l] - X_(i, l);
      weighted[l] = spec_.inv_sq_lengthscales[l] * diff;
      s += weighted[l] * diff;
    }
    const double scale = 2.0 * kernel_dk_ds(spec_, s);
    for (Eigen::Index l = 0; l < d; ++l) j(i, l) = scale * weighted[l];
  }
  return j;
}

Eigen::VectorXd GpModel::mean_grad(const Eigen::VectorXd& x) const {
  require_fitted();
  Eigen::VectorXd grad = cross_grad(x).transpose() * alpha_;
  if (prior_) {
    for (Eigen::Index i = 0; i < dim(); ++i) {
      const double h = 1e-6 * (1.0 + std::abs(x[i]));
      Eigen::VectorXd xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      grad[i] += (prior_(xp) - prior_(xm)) / (2.0 * h);
    }
  }
  return grad;
}

Eigen::VectorXd GpModel::var_grad(const Eigen::VectorXd& x) const {
  require_fitted();
  const Eigen::VectorXd k_star = cross_covariance(spec_, X_, x);
  const Eigen::VectorXd v = inverse_ * k_star;
  return -2.0 * cross_grad(x).transpose() * v;
}

Eigen::MatrixXd GpModel::var_hess(const Eigen::VectorXd& x) const {
  require_fitted();
  const Eigen::VectorXd k_star = cross_covariance(spec_, X_, x);
  const Eigen::VectorXd v = inverse_ * k_star;
  const Eigen::MatrixXd j = cross_grad(x);
  const Eigen::MatrixXd jt_ainv_j = j.transpose() * (inverse_ * j);
  Eigen::MatrixXd hess = -2.0 * jt_ainv_j;
  for (Eigen::Index i = 0; i < X_.rows(); ++i)
    hess -= 2.0 * v[i] * kernel_hess_x(spec_, x, X_.row(i).transpose());
  return hess;
}

}  // namespace safedoe::gp
