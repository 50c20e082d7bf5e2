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

#include "safedoe/kernels.hpp"

#include <cmath>
#include <string>

#include "safedoe/errors.hpp"

namespace safedoe::gp {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt5 = 2.23606797749979;

void check_dims(const KernelSpec& spec, const Eigen::VectorXd& x,
                const Eigen::VectorXd& y) {
  if (x.size() != y.size() || x.size() != spec.dim())
    throw Error(ErrorCode::DimensionMismatch,
                "kernel_eval: point dimension " + std::to_string(x.size()) + "/" +
                    std::to_string(y.size()) + " does not match kernel dimension " +
                    std::to_string(spec.dim()));
}

// Correlation phi as a function of the squared weighted distance s = r^2.
double correlation(KernelFamily family, double s) {
  switch (family) {
    case KernelFamily::SquaredExponential:
      return std::exp(-0.5 * s);
    case KernelFamily::Matern32: {
      const double r = std::sqrt(s);
      return (1.0 + kSqrt3 * r) * std::exp(-kSqrt3 * r);
    }
    case KernelFamily::Matern52: {
      const double r = std::sqrt(s);
      return (1.0 + kSqrt5 * r + (5.0 / 3.0) * s) * std::exp(-kSqrt5 * r);
    }
  }
  return 0.0;
}

// g(s) = d k / d s, so that grad_x k = 2 g(s) Lambda (x - y).
double dk_ds(const KernelSpec& spec, double s) {
  switch (spec.family) {
    case KernelFamily::SquaredExponential:
      return -0.5 * spec.signal_variance * std::exp(-0.5 * s);
    case KernelFamily::Matern32: {
      const double r = std::sqrt(s);
      return -1.5 * spec.signal_variance * std::exp(-kSqrt3 * r);
    }
    case KernelFamily::Matern52: {
      const double r = std::sqrt(s);
      return -(5.0 / 6.0) * spec.signal_variance * (1.0 + kSqrt5 * r) *
             std::exp(-kSqrt5 * r);
    }
  }
  return 0.0;
}

// g'(s) = d^2 k / d s^2. Diverges for Matern32 at s = 0.
double d2k_ds2(const KernelSpec& spec, double s) {
  switch (spec.family) {
    case KernelFamily::SquaredExponential:
      return 0.25 * spec.signal_variance * std::exp(-0.5 * s);
    case KernelFamily::Matern32: {
      if (s == 0.0)
        throw Error(ErrorCode::InvalidArgument,
                    "Matern32 second derivative is undefined at zero distance");
      const double r = std::sqrt(s);
      return (3.0 * kSqrt3 / 4.0) * spec.signal_variance * std::exp(-kSqrt3 * r) / r;
    }
    case KernelFamily::Matern52: {
      const double r = std::sqrt(s);
      return (25.0 / 12.0) * spec.signal_variance * std::exp(-kSqrt5 * r);
    }
  }
  return 0.0;
}

}  // namespace

const char* kernel_family_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::SquaredExponential: return "squared_exponential";
    case KernelFamily::Matern32: return "matern32";
    case KernelFamily::Matern52: return "matern52";
  }
  return "unknown";
}

KernelFamily kernel_family_from_name(const std::string& name) {
  if (name == "squared_exponential" || name == "se")
    return KernelFamily::SquaredExponential;
  if (name == "matern32") return KernelFamily::Matern32;
  if (name == "matern52") return KernelFamily::Matern52;
  throw Error(ErrorCode::InvalidArgument, "unknown kernel family: " + name);
}

void KernelSpec::validate() const {
  if (!(signal_variance > 0.0))
    throw Error(ErrorCode::InvalidArgument, "kernel signal_variance must be > 0");
  if (!(noise_variance >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "kernel noise_variance must be >= 0");
  if (inv_sq_lengthscales.size() == 0 || (inv_sq_lengthscales.array() <= 0.0).any())
    throw Error(ErrorCode::InvalidArgument,
                "kernel inverse-squared lengthscales must all be > 0");
}

double kernel_dk_ds(const KernelSpec& spec, double s) { return dk_ds(spec, s); }

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y) {
  check_dims(spec, x, y);
  const double s =
      (spec.inv_sq_lengthscales.array() * (x - y).array().square()).sum();
  return spec.signal_variance * correlation(spec.family, s);
}

Eigen::VectorXd kernel_grad_x(const KernelSpec& spec, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& y) {
  check_dims(spec, x, y);
  const Eigen::VectorXd weighted = spec.inv_sq_lengthscales.cwiseProduct(x - y);
  const double s = weighted.dot(x - y);
  return 2.0 * dk_ds(spec, s) * weighted;
}

Eigen::MatrixXd kernel_hess_x(const KernelSpec& spec, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& y) {
  check_dims(spec, x, y);
  const Eigen::VectorXd weighted = spec.inv_sq_lengthscales.cwiseProduct(x - y);
  const double s = weighted.dot(x - y);
  Eigen::MatrixXd hess =
      4.0 * d2k_ds2(spec, s) * (weighted * weighted.transpose());
  hess.diagonal() += 2.0 * dk_ds(spec, s) * spec.inv_sq_lengthscales;
  return hess;
}

Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const Eigen::MatrixXd& X) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    gram(i, i) = spec.signal_variance;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double s = (spec.inv_sq_lengthscales.array() *
                        (X.row(i) - X.row(j)).transpose().array().square())
                           .sum();
      gram(i, j) = spec.signal_variance * correlation(spec.family, s);
      gram(j, i) = gram(i, j);
    }
  }
  return gram;
}

Eigen::VectorXd cross_covariance(const KernelSpec& spec, const Eigen::MatrixXd& X,
                                 const Eigen::VectorXd& x) {
  const Eigen::Index n = X.rows();
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = (spec.inv_sq_lengthscales.array() *
                      (X.row(i).transpose() - x).array().square())
                         .sum();
    k[i] = spec.signal_variance * correlation(spec.family, s);
  }
  return k;
}

}  // namespace safedoe::gp
