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

#include "safedoe/safe_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "safedoe/errors.hpp"
#include "safedoe/optim.hpp"
#include "safedoe/rng.hpp"

namespace safedoe::safeopt {

double cantelli_r(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw Error(ErrorCode::InvalidArgument,
                "cantelli_r: epsilon must lie in (0, 1), got " + std::to_string(epsilon));
  return std::sqrt((1.0 - epsilon) / epsilon);
}

double ChanceConstraint::tightened(const Eigen::VectorXd& u_norm) const {
  if (!mismatch_gp || !mismatch_gp->fitted())
    throw Error(ErrorCode::NotFitted,
                "tightened_constraint: mismatch GP for " + def.name + " is not fitted");
  const gp::Prediction p = mismatch_gp->predict(u_norm);
  return p.mean + cantelli_r(epsilon) * std::sqrt(std::max(p.variance, 0.0));
}

void TrustRegion::validate() const {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "trust radius must be > 0");
  if (!(t2 < 1.0 && 1.0 < t1))
    throw Error(ErrorCode::InvalidArgument, "trust region needs t2 < 1 < t1");
  if (!(t3 < 1.0)) throw Error(ErrorCode::InvalidArgument, "trust region needs t3 < 1");
  if (!(eta1 > 0.0 && eta2 > 0.0))
    throw Error(ErrorCode::InvalidArgument, "trust region needs positive eta1, eta2");
}

double tr_rho(double g_observed, double g_predicted) {
  const double denom = std::max(std::abs(g_observed), 1e-6);
  const double ratio = (g_observed - g_predicted) / denom;
  return ratio * ratio;
}

TrustRegion tr_update(const TrustRegion& tr, double rho) {
  if (!(rho >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "tr_update: rho must be >= 0");
  TrustRegion out = tr;
  if (rho <= tr.eta1)
    out.radius = tr.t1 * tr.radius;
  else if (rho >= tr.eta2)
    out.radius = tr.t2 * tr.radius;
  return out;
}

SolveResult solve_penalized(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const std::vector<std::function<double(const Eigen::VectorXd&)>>& constraints,
    const std::optional<Ball>& ball, const SolveOptions& options) {
  if (!ball)
    throw Error(ErrorCode::InvalidArgument, "solve_penalized: missing search region");
  const Eigen::Index d = ball->center.size();

  optim::BoxBounds box{Eigen::VectorXd::Constant(d, -1.0), Eigen::VectorXd::Constant(d, 1.0)};
  const bool ball_active = std::isfinite(ball->radius);

  // Start points: the center plus a Latin hypercube in the enclosing cube of
  // the ball, clipped to the box. Infeasible starts are fine; the penalty
  // pulls them in.
  std::vector<Eigen::VectorXd> starts;
  starts.push_back(box.clamp(ball->center));
  if (options.n_starts > 1) {
    rng::Stream stream(options.seed, "optimizer-starts");
    Eigen::VectorXd lo(d), hi(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      lo[i] = ball_active ? std::max(ball->center[i] - ball->radius, -1.0) : -1.0;
      hi[i] = ball_active ? std::min(ball->center[i] + ball->radius, 1.0) : 1.0;
      if (!(hi[i] > lo[i])) {
        lo[i] = ball->center[i];
        hi[i] = ball->center[i];
      }
    }
    const Eigen::MatrixXd lhs = rng::latin_hypercube(options.n_starts - 1, lo, hi, stream);
    for (int i = 0; i + 1 < options.n_starts; ++i) starts.push_back(lhs.row(i).transpose());
  }

  optim::LbfgsOptions lbfgs;
  lbfgs.max_iterations = options.max_iterations;
  lbfgs.grad_tol = 1e-7;

  SolveResult best;
  best.u = box.clamp(ball->center);
  best.objective = std::numeric_limits<double>::infinity();
  best.feasible = false;
  int evaluations = 0;

  // Pure-violation measure used for the feasibility polish after each
  // penalty round; a quadratic penalty alone leaves iterates slightly
  // outside the boundary.
  auto violation_only = [&](const Eigen::VectorXd& u) {
    ++evaluations;
    try {
      double total = 0.0;
      for (const auto& c : constraints) {
        const double v = std::max(0.0, c(u));
        total += v * v;
      }
      if (ball_active) {
        const double excess =
            std::max(0.0, (u - ball->center).squaredNorm() - ball->radius * ball->radius);
        total += excess * excess;
      }
      return total;
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  auto worst_constraint = [&](const Eigen::VectorXd& u) {
    double worst = 0.0;
    for (const auto& c : constraints) worst = std::max(worst, c(u));
    return worst;
  };

  for (const Eigen::VectorXd& start : starts) {
    double mu = options.penalty_init;
    Eigen::VectorXd x = start;
    Eigen::VectorXd x_prev_round;
    for (int round = 0; round < options.penalty_rounds; ++round) {
      auto penalized = [&](const Eigen::VectorXd& u) {
        ++evaluations;
        try {
          double value = objective(u);
          for (const auto& c : constraints) {
            const double violation = std::max(0.0, c(u));
            value += mu * violation * violation;
          }
          if (ball_active) {
            const double excess = std::max(
                0.0, (u - ball->center).squaredNorm() - ball->radius * ball->radius);
            value += mu * excess * excess;
          }
          return value;
        } catch (const Error&) {
          // Unevaluable point (e.g. integration blow-up): repel the search.
          return std::numeric_limits<double>::infinity();
        }
      };
      optim::LbfgsOptions round_opts = lbfgs;
      if (round > 0)
        round_opts.max_iterations = std::max(10, options.max_iterations / 2);
      const optim::OptimResult r = optim::lbfgs_minimize_fd(
          penalized, x, box, round_opts, options.fd_step, /*forward=*/true);
      x = r.x;

      double raw_worst = std::numeric_limits<double>::infinity();
      try {
        raw_worst = worst_constraint(x);
      } catch (const Error&) {
      }

      Eigen::VectorXd candidate = x;
      try {
        const double near = worst_constraint(candidate);
        if (near > 0.0 && std::isfinite(near)) {
          optim::LbfgsOptions polish;
          polish.max_iterations = 30;
          polish.grad_tol = 1e-12;
          candidate =
              optim::lbfgs_minimize_fd(violation_only, candidate, box, polish,
                                       options.fd_step)
                  .x;
        }
      } catch (const Error&) {
      }
      if (ball_active) {
        // Exact ball projection; the segment to the center stays in the box.
        const Eigen::VectorXd offset = candidate - ball->center;
        const double dist = offset.norm();
        if (dist > ball->radius && dist > 0.0)
          candidate = ball->center + offset * (ball->radius / dist);
      }
      candidate = box.clamp(candidate);

      bool evaluable = true;
      double worst = 0.0;
      double value = std::numeric_limits<double>::infinity();
      try {
        worst = worst_constraint(candidate);
        if (worst <= options.feasibility_tol) value = objective(candidate);
      } catch (const Error&) {
        evaluable = false;
      }
      if (evaluable && worst <= options.feasibility_tol) {
        if (!best.feasible || value < best.objective) {
          best.feasible = true;
          best.objective = value;
          best.u = candidate;
        }
        // An interior optimum needs no further escalation; a polished
        // boundary point improves with a stiffer penalty.
        if (raw_worst <= options.feasibility_tol) break;
        if (x_prev_round.size() > 0 &&
            (x - x_prev_round).lpNorm<Eigen::Infinity>() < 1e-5)
          break;  // the escalation has stopped moving the iterate
      }
      x_prev_round = x;
      mu *= 10.0;
    }
  }

  best.evaluations = evaluations;
  if (!best.feasible) {
    // No start reached feasibility: hold the previous point, flagged.
    best.u = box.clamp(ball->center);
    try {
      best.objective = objective(best.u);
    } catch (const Error&) {
      best.objective = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return best;
}

SolveResult solve_design(
    const std::function<double(const Eigen::VectorXd&)>& objective_norm,
    const std::vector<ChanceConstraint>& constraints,
    const std::vector<TrustRegion>& trust_regions, const Eigen::VectorXd& u_k_norm,
    const SolveOptions& options) {
  if (constraints.size() != trust_regions.size())
    throw Error(ErrorCode::DimensionMismatch,
                "solve_design: one trust region per constraint required");
  double min_radius = std::numeric_limits<double>::infinity();
  for (const TrustRegion& tr : trust_regions) {
    tr.validate();
    min_radius = std::min(min_radius, tr.radius);
  }
  if (constraints.empty()) min_radius = std::numeric_limits<double>::infinity();

  std::vector<std::function<double(const Eigen::VectorXd&)>> fns;
  fns.reserve(constraints.size());
  for (const ChanceConstraint& c : constraints)
    fns.push_back([&c](const Eigen::VectorXd& u) { return c.tightened(u); });

  Ball ball{u_k_norm, min_radius};
  return solve_penalized(objective_norm, fns, ball, options);
}

}  // namespace safedoe::safeopt
