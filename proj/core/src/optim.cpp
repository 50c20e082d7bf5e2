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

#include "safedoe/optim.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <deque>
#include <limits>

#include "safedoe/errors.hpp"

namespace safedoe::optim {

namespace {

// Projected-gradient convergence measure: components pushing against an
// active bound do not count.
double projected_grad_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& grad,
                           const BoxBounds& bounds) {
  double norm = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double g = grad[i];
    if (x[i] <= bounds.lo[i] && g > 0.0) g = 0.0;
    if (x[i] >= bounds.hi[i] && g < 0.0) g = 0.0;
    norm = std::max(norm, std::abs(g));
  }
  return norm;
}

}  // namespace

OptimResult lbfgs_minimize(const ObjectiveFn& fn, const Eigen::VectorXd& x0,
                           const BoxBounds& bounds, const LbfgsOptions& options) {
  if (bounds.lo.size() != x0.size() || bounds.hi.size() != x0.size())
    throw Error(ErrorCode::DimensionMismatch, "lbfgs: bounds/initial point size mismatch");

  const Eigen::Index n = x0.size();
  Eigen::VectorXd x = bounds.clamp(x0);
  Eigen::VectorXd grad(n);
  double f = fn(x, &grad);

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;
  int stagnant = 0;

  OptimResult result;
  result.x = x;
  result.value = f;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter;
    if (!std::isfinite(f)) break;
    if (projected_grad_norm(x, grad, bounds) < options.grad_tol) {
      result.converged = true;
      break;
    }

    // Two-loop recursion.
    Eigen::VectorXd q = grad;
    std::vector<double> alpha(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alpha[static_cast<std::size_t>(i)] =
          rho_hist[static_cast<std::size_t>(i)] *
          s_hist[static_cast<std::size_t>(i)].dot(q);
      q -= alpha[static_cast<std::size_t>(i)] * y_hist[static_cast<std::size_t>(i)];
    }
    if (!s_hist.empty()) {
      const Eigen::VectorXd& s = s_hist.back();
      const Eigen::VectorXd& y = y_hist.back();
      q *= s.dot(y) / y.squaredNorm();
    }
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    Eigen::VectorXd direction = -q;
    if (direction.dot(grad) > -1e-14 * grad.norm() * direction.norm()) {
      direction = -grad;
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    // Armijo backtracking on the projected path; the sufficient-decrease
    // test uses the projected displacement so clamped components do not
    // demand impossible progress. Steepest-descent (re)starts are scaled to
    // a unit-sized first trial.
    double step = 1.0;
    if (s_hist.empty()) {
      const double dir_norm = direction.lpNorm<Eigen::Infinity>();
      if (dir_norm > 1.0) step = 1.0 / dir_norm;
    }
    Eigen::VectorXd x_new;
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      x_new = bounds.clamp(x + step * direction);
      f_new = fn(x_new, nullptr);
      const double predicted = 1e-4 * grad.dot(x_new - x);
      if (std::isfinite(f_new) && f_new <= f + predicted) {
        accepted = true;
        break;
      }
      step *= 0.5;
      if (step * direction.lpNorm<Eigen::Infinity>() < options.step_tol) break;
    }
    if (!accepted) {
      if (!s_hist.empty()) {
        // Retry this iteration from scratch along the raw gradient.
        s_hist.clear();
        y_hist.clear();
        rho_hist.clear();
        continue;
      }
      result.converged = projected_grad_norm(x, grad, bounds) < 10.0 * options.grad_tol;
      break;
    }

    Eigen::VectorXd grad_new(n);
    f_new = fn(x_new, &grad_new);

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = grad_new - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > options.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    if (options.value_tol > 0.0 &&
        std::abs(f - f_new) <= options.value_tol * (1.0 + std::abs(f_new))) {
      if (++stagnant >= 2) {
        x = x_new;
        f = f_new;
        result.converged = true;
        if (f < result.value) {
          result.value = f;
          result.x = x;
        }
        break;
      }
    } else {
      stagnant = 0;
    }
    x = x_new;
    grad = grad_new;
    f = f_new;
    if (f < result.value) {
      result.value = f;
      result.x = x;
    }
  }
  if (f < result.value) {
    result.value = f;
    result.x = x;
  }
  return result;
}

OptimResult lbfgs_minimize_fd(const std::function<double(const Eigen::VectorXd&)>& f,
                              const Eigen::VectorXd& x0, const BoxBounds& bounds,
                              const LbfgsOptions& options, double fd_step,
                              bool forward) {
  ObjectiveFn fn = [&, forward](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
    const double value = f(x);
    if (grad != nullptr) {
      grad->resize(x.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = fd_step * std::max(1.0, std::abs(x[i]));
        Eigen::VectorXd xp = x;
        xp[i] += h;
        if (forward) {
          (*grad)[i] = (f(xp) - value) / h;
        } else {
          Eigen::VectorXd xm = x;
          xm[i] -= h;
          (*grad)[i] = (f(xp) - f(xm)) / (2.0 * h);
        }
      }
    }
    return value;
  };
  return lbfgs_minimize(fn, x0, bounds, options);
}

OptimResult levenberg_marquardt(const ResidualFn& residual, const JacobianFn& jacobian,
                                const Eigen::VectorXd& x0, const BoxBounds& bounds,
                                const LmOptions& options) {
  Eigen::VectorXd x = bounds.clamp(x0);
  Eigen::VectorXd r = residual(x);
  double cost = 0.5 * r.squaredNorm();
  double lambda = options.lambda_init;
  double growth = 2.0;  // Nielsen damping schedule

  OptimResult result;
  result.x = x;
  result.value = cost;

  Eigen::MatrixXd jac;
  bool jac_fresh = false;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter;
    if (!jac_fresh) {
      jac = jacobian(x);
      jac_fresh = true;
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;
    if (jtr.lpNorm<Eigen::Infinity>() < 1e-12) {
      result.converged = true;
      break;
    }

    Eigen::MatrixXd damped = jtj;
    damped.diagonal().array() += lambda * (jtj.diagonal().array().abs() + 1e-12);
    const Eigen::VectorXd step = damped.ldlt().solve(-jtr);
    const Eigen::VectorXd x_trial = bounds.clamp(x + step);
    const Eigen::VectorXd actual_step = x_trial - x;
    if (actual_step.lpNorm<Eigen::Infinity>() < options.step_tol) {
      result.converged = true;
      break;
    }
    const Eigen::VectorXd r_trial = residual(x_trial);
    const double cost_trial = 0.5 * r_trial.squaredNorm();

    // Gain ratio of actual to predicted reduction steers the damping.
    const double predicted =
        -actual_step.dot(jtr) - 0.5 * (jac * actual_step).squaredNorm();
    const double gain = predicted > 0.0
                            ? (cost - cost_trial) / predicted
                            : (cost_trial < cost ? 1.0 : -1.0);

    if (std::isfinite(cost_trial) && cost_trial < cost) {
      const double decrease = (cost - cost_trial) / std::max(cost, 1e-300);
      x = x_trial;
      r = r_trial;
      cost = cost_trial;
      jac_fresh = false;
      const double shrink = 1.0 - std::pow(2.0 * gain - 1.0, 3);
      lambda = std::max(lambda * std::max(1.0 / 3.0, std::min(shrink, 1.0)), 1e-14);
      growth = 2.0;
      if (cost < result.value) {
        result.value = cost;
        result.x = x;
      }
      if (decrease < options.cost_tol) {
        result.converged = true;
        break;
      }
    } else {
      lambda *= growth;
      growth *= 2.0;
      if (lambda > 1e14) break;
    }
  }
  return result;
}

}  // namespace safedoe::optim
