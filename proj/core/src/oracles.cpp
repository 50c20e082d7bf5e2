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

#include "safedoe/oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "safedoe/errors.hpp"

namespace safedoe::oracles {

namespace {

// Kernel evaluated from the published formulas, written out independently of
// the library kernel code.
double kernel_value(const gp::KernelSpec& spec, const Eigen::VectorXd& a,
                    const Eigen::VectorXd& b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += spec.inv_sq_lengthscales[i] * d * d;
  }
  const double r = std::sqrt(s);
  switch (spec.family) {
    case gp::KernelFamily::SquaredExponential:
      return spec.signal_variance * std::exp(-0.5 * s);
    case gp::KernelFamily::Matern32:
      return spec.signal_variance * (1.0 + std::sqrt(3.0) * r) *
             std::exp(-std::sqrt(3.0) * r);
    case gp::KernelFamily::Matern52:
      return spec.signal_variance * (1.0 + std::sqrt(5.0) * r + (5.0 / 3.0) * s) *
             std::exp(-std::sqrt(5.0) * r);
  }
  return 0.0;
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 == 0 ? 2.0 : 4.0);
  return sum * h / 3.0;
}

double bisect(const std::function<double(double)>& cdf, double p, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < p)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-12 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

MeanVar gp_two_point_closed_form(const TwoPointGp& fixture, const Eigen::VectorXd& x_star) {
  const double a11 = fixture.spec.signal_variance + fixture.spec.noise_variance;
  const double a22 = a11;
  const double a12 = kernel_value(fixture.spec, fixture.x1, fixture.x2);
  const double det = a11 * a22 - a12 * a12;

  const double k1 = kernel_value(fixture.spec, x_star, fixture.x1);
  const double k2 = kernel_value(fixture.spec, x_star, fixture.x2);
  const double r1 = fixture.y1 - fixture.prior1;
  const double r2 = fixture.y2 - fixture.prior2;

  // A^-1 r and k*^T A^-1 k* via the 2x2 adjugate.
  const double inv_r1 = (a22 * r1 - a12 * r2) / det;
  const double inv_r2 = (-a12 * r1 + a11 * r2) / det;
  const double quad = (a22 * k1 * k1 - 2.0 * a12 * k1 * k2 + a11 * k2 * k2) / det;

  MeanVar out;
  const double prior_star = fixture.prior ? fixture.prior(x_star) : 0.0;
  out.mean = prior_star + k1 * inv_r1 + k2 * inv_r2;
  out.variance = fixture.spec.signal_variance - quad;
  return out;
}

double chi_squared_quantile(double p, double dof) {
  // CDF via the substitution x = t^2, which removes the dof = 1 singularity:
  // F(x) = int_0^sqrt(x) 2 t^(k-1) exp(-t^2/2) dt / (2^(k/2) Gamma(k/2)).
  const double log_norm =
      (0.5 * dof) * std::log(2.0) + std::lgamma(0.5 * dof);
  auto cdf = [&](double x) {
    if (x <= 0.0) return 0.0;
    auto integrand = [&](double t) {
      if (t == 0.0 && dof < 2.0) return dof == 1.0 ? 2.0 * std::exp(-log_norm) : 0.0;
      return 2.0 * std::exp((dof - 1.0) * std::log(t) - 0.5 * t * t - log_norm);
    };
    return simpson(integrand, 0.0, std::sqrt(x), 4096);
  };
  double hi = dof + 10.0;
  while (cdf(hi) < p) hi *= 2.0;
  return bisect(cdf, p, 0.0, hi);
}

double student_t_quantile(double p, double dof) {
  // Map t = sqrt(dof) tan(u): the half-line integral becomes
  // C sqrt(dof) int_0^atan(x/sqrt(dof)) cos(u)^(dof-1) du on a bounded range.
  const double log_c = std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
                       0.5 * std::log(dof * std::numbers::pi);
  const double scale = std::exp(log_c) * std::sqrt(dof);
  auto cdf = [&](double x) {
    const double sign = x < 0.0 ? -1.0 : 1.0;
    const double upper = std::atan(std::abs(x) / std::sqrt(dof));
    const double half = scale * simpson(
                                    [&](double u) {
                                      return std::pow(std::cos(u), dof - 1.0);
                                    },
                                    0.0, upper, 4096);
    return 0.5 + sign * half;
  };
  if (p == 0.5) return 0.0;
  const double target = p;
  double lo = 0.0, hi = 2.0;
  if (p > 0.5) {
    while (cdf(hi) < target) hi *= 2.0;
    return bisect(cdf, target, lo, hi);
  }
  double lo_neg = -2.0;
  while (cdf(lo_neg) > target) lo_neg *= 2.0;
  return bisect(cdf, target, lo_neg, 0.0);
}

double log_det_eigen(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(m);
  double out = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) out += std::log(eigen.eigenvalues()[i]);
  return out;
}

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd grad(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    grad[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return grad;
}

Eigen::MatrixXd fd_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& x, double h) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd hess(n, n);
  const double f0 = f(x);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      if (i == j) {
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        hess(i, i) = (f(xp) - 2.0 * f0 + f(xm)) / (h * h);
      } else {
        Eigen::VectorXd xpp = x, xpm = x, xmp = x, xmm = x;
        xpp[i] += h; xpp[j] += h;
        xpm[i] += h; xpm[j] -= h;
        xmp[i] -= h; xmp[j] += h;
        xmm[i] -= h; xmm[j] -= h;
        hess(i, j) = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * h * h);
        hess(j, i) = hess(i, j);
      }
    }
  }
  return hess;
}

MeanVar mc_propagate(const gp::GpModel& model, const Eigen::VectorXd& mu,
                     const Eigen::MatrixXd& sigma, int n_samples, std::uint64_t seed) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(sigma);
  const Eigen::MatrixXd transform =
      eigen.eigenvectors() * eigen.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  std::mt19937_64 gen(seed);
  auto normal = [&gen]() {
    // Box-Muller on raw 53-bit uniforms; self-contained on purpose.
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    const double u2 = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  };

  double sum_mean = 0.0, sum_mean_sq = 0.0, sum_var = 0.0;
  Eigen::VectorXd z(mu.size());
  for (int s = 0; s < n_samples; ++s) {
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal();
    const Eigen::VectorXd x = mu + transform * z;
    const gp::Prediction p = model.predict(x);
    sum_mean += p.mean;
    sum_mean_sq += p.mean * p.mean;
    sum_var += p.variance;
  }
  const double n = static_cast<double>(n_samples);
  MeanVar out;
  out.mean = sum_mean / n;
  // Law of total variance: E[Sigma] + Var[m].
  out.variance = sum_var / n + (sum_mean_sq / n - out.mean * out.mean);
  return out;
}

Eigen::VectorXd nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x0, double step, int max_evals) {
  const Eigen::Index n = x0.size();
  std::vector<Eigen::VectorXd> simplex;
  std::vector<double> values;
  simplex.push_back(x0);
  values.push_back(f(x0));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd x = x0;
    x[i] += step * std::max(1.0, std::abs(x0[i]));
    simplex.push_back(x);
    values.push_back(f(x));
  }
  int evals = static_cast<int>(simplex.size());

  auto order = [&]() {
    std::vector<std::size_t> idx(simplex.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<Eigen::VectorXd> s2;
    std::vector<double> v2;
    for (std::size_t i : idx) {
      s2.push_back(simplex[i]);
      v2.push_back(values[i]);
    }
    simplex.swap(s2);
    values.swap(v2);
  };

  while (evals < max_evals) {
    order();
    if (std::abs(values.back() - values.front()) <
        1e-12 * (1.0 + std::abs(values.front())))
      break;
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i + 1 < simplex.size(); ++i) centroid += simplex[i];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = centroid + (centroid - simplex.back());
    const double fr = f(reflected);
    ++evals;
    if (fr < values.front()) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex.back());
      const double fe = f(expanded);
      ++evals;
      if (fe < fr) {
        simplex.back() = expanded;
        values.back() = fe;
      } else {
        simplex.back() = reflected;
        values.back() = fr;
      }
    } else if (fr < values[values.size() - 2]) {
      simplex.back() = reflected;
      values.back() = fr;
    } else {
      const Eigen::VectorXd contracted = centroid + 0.5 * (simplex.back() - centroid);
      const double fc = f(contracted);
      ++evals;
      if (fc < values.back()) {
        simplex.back() = contracted;
        values.back() = fc;
      } else {
        for (std::size_t i = 1; i < simplex.size(); ++i) {
          simplex[i] = simplex.front() + 0.5 * (simplex[i] - simplex.front());
          values[i] = f(simplex[i]);
          ++evals;
        }
      }
    }
  }
  order();
  return simplex.front();
}

}  // namespace safedoe::oracles
