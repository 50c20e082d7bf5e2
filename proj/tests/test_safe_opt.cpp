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

#include <doctest.h>

#include <cmath>
#include <memory>

#include "safedoe/errors.hpp"
#include "safedoe/oracles.hpp"
#include "safedoe/rng.hpp"
#include "safedoe/safe_opt.hpp"

using namespace safedoe;

namespace {

safeopt::TrustRegion table_region(double radius = 0.3) {
  safeopt::TrustRegion tr;
  tr.radius = radius;
  tr.eta1 = 1e-3;
  tr.eta2 = 1e-2;
  tr.t1 = 2.0;
  tr.t2 = 0.5;
  tr.t3 = 0.5;
  return tr;
}

std::shared_ptr<gp::GpModel> two_point_gp(double noise = 0.0) {
  gp::KernelSpec spec;
  spec.family = gp::KernelFamily::SquaredExponential;
  spec.signal_variance = 0.5;
  spec.inv_sq_lengthscales = Eigen::VectorXd::Constant(2, 1.5);
  spec.noise_variance = noise;
  Eigen::MatrixXd X(2, 2);
  X << -0.4, 0.2, 0.5, -0.3;
  Eigen::VectorXd y(2);
  y << -0.2, 0.1;
  return std::make_shared<gp::GpModel>(gp::GpModel::with_hyperparameters(X, y, spec));
}

}  // namespace

TEST_SUITE_BEGIN("safe_opt");

TEST_CASE("cantelli factor") {
  CHECK(safeopt::cantelli_r(0.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(safeopt::cantelli_r(0.1) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(safeopt::cantelli_r(0.01) == doctest::Approx(9.9499).epsilon(1e-4));
  CHECK_THROWS_AS(safeopt::cantelli_r(0.0), Error);
  CHECK_THROWS_AS(safeopt::cantelli_r(1.0), Error);
  CHECK_THROWS_AS(safeopt::cantelli_r(-0.2), Error);

  rng::Stream stream(19, "cantelli");
  for (int rep = 0; rep < 1000; ++rep) {
    const double e1 = stream.uniform(1e-6, 1.0 - 1e-6);
    const double e2 = stream.uniform(1e-6, 1.0 - 1e-6);
    if (e1 == e2) continue;
    const double lo = std::min(e1, e2), hi = std::max(e1, e2);
    CHECK(safeopt::cantelli_r(lo) > safeopt::cantelli_r(hi));
  }
}

TEST_CASE("tightened constraint values") {
  safeopt::ChanceConstraint c;
  c.def = {"g", 0, 0.0, true, 0.1};
  c.epsilon = 0.1;
  c.mismatch_gp = two_point_gp(0.0);

  // at a training point with zero noise the variance vanishes and the
  // tightened value is the observed one
  const Eigen::VectorXd u0 = c.mismatch_gp->inputs().row(0).transpose();
  CHECK(c.tightened(u0) == doctest::Approx(-0.2).epsilon(1e-6));

  safeopt::ChanceConstraint half = c;
  half.epsilon = 0.5;  // r = 1; with zero variance still the raw mean
  CHECK(half.tightened(u0) == doctest::Approx(-0.2).epsilon(1e-6));

  // off the data, compare against the independent closed form
  oracles::TwoPointGp fixture;
  fixture.spec = c.mismatch_gp->kernel();
  fixture.x1 = c.mismatch_gp->inputs().row(0).transpose();
  fixture.x2 = c.mismatch_gp->inputs().row(1).transpose();
  fixture.y1 = -0.2;
  fixture.y2 = 0.1;
  rng::Stream stream(21, "tighten-grid");
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd u(2);
    u << stream.uniform(-1.0, 1.0), stream.uniform(-1.0, 1.0);
    const oracles::MeanVar mv = oracles::gp_two_point_closed_form(fixture, u);
    const double expected = mv.mean + 3.0 * std::sqrt(std::max(mv.variance, 0.0));
    CHECK(c.tightened(u) == doctest::Approx(expected).epsilon(1e-9));
  }

  safeopt::ChanceConstraint unfitted;
  unfitted.mismatch_gp = std::make_shared<gp::GpModel>();
  CHECK_THROWS_AS(unfitted.tightened(u0), Error);
}

TEST_CASE("trust-region updates follow the three-band rule") {
  const safeopt::TrustRegion tr = table_region();
  CHECK(safeopt::tr_update(tr, 1e-4).radius == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(safeopt::tr_update(tr, 0.05).radius == doctest::Approx(0.15).epsilon(1e-14));
  CHECK(safeopt::tr_update(tr, 5e-3).radius == doctest::Approx(0.3).epsilon(1e-14));
  // band edges are inclusive
  CHECK(safeopt::tr_update(tr, 1e-3).radius == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(safeopt::tr_update(tr, 1e-2).radius == doctest::Approx(0.15).epsilon(1e-14));
  CHECK_THROWS_AS(safeopt::tr_update(tr, -1.0), Error);

  safeopt::TrustRegion bad = tr;
  bad.t1 = 0.9;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("rho guards against near-zero observations") {
  CHECK(safeopt::tr_rho(0.2, 0.1) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(safeopt::tr_rho(0.0, 1e-3) == doctest::Approx(1e6).epsilon(1e-9));
  CHECK(safeopt::tr_rho(-1e-9, -1e-9) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("unconstrained quadratic lands on the analytic minimum") {
  Eigen::VectorXd target(2);
  target << 0.2, -0.1;
  auto objective = [&](const Eigen::VectorXd& u) { return (u - target).squaredNorm(); };
  safeopt::SolveOptions options;
  options.seed = 3;
  const safeopt::SolveResult result = safeopt::solve_penalized(
      objective, {}, safeopt::Ball{Eigen::VectorXd::Zero(2), 0.5}, options);
  CHECK(result.feasible);
  CHECK((result.u - target).lpNorm<Eigen::Infinity>() < 1e-4);
}

TEST_CASE("active linear constraint projects onto its boundary") {
  Eigen::VectorXd target(2);
  target << 0.4, -0.2;
  const double limit = 0.1;  // u0 <= 0.1 excludes the free optimum
  auto objective = [&](const Eigen::VectorXd& u) { return (u - target).squaredNorm(); };
  std::vector<std::function<double(const Eigen::VectorXd&)>> constraints{
      [&](const Eigen::VectorXd& u) { return u[0] - limit; }};
  safeopt::SolveOptions options;
  options.seed = 5;
  const safeopt::SolveResult result = safeopt::solve_penalized(
      objective, constraints, safeopt::Ball{Eigen::VectorXd::Zero(2), 1.0}, options);
  CHECK(result.feasible);
  CHECK(result.u[0] == doctest::Approx(limit).epsilon(2e-4));
  CHECK(result.u[1] == doctest::Approx(-0.2).epsilon(2e-3));
}

TEST_CASE("a vanishing trust radius pins the design to the incumbent") {
  auto objective = [](const Eigen::VectorXd& u) { return u.sum(); };
  safeopt::ChanceConstraint c;
  c.def = {"g", 0, 0.0, true, 0.1};
  c.epsilon = 0.1;
  c.mismatch_gp = two_point_gp(1e-4);
  Eigen::VectorXd u_k(2);
  u_k << 0.3, -0.6;
  safeopt::SolveOptions options;
  options.seed = 7;
  const safeopt::SolveResult result =
      safeopt::solve_design(objective, {c}, {table_region(1e-9)}, u_k, options);
  CHECK((result.u - u_k).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("solutions always stay inside the pooled ball") {
  rng::Stream stream(9, "ball");
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd target(2), u_k(2);
    target << stream.uniform(-1.0, 1.0), stream.uniform(-1.0, 1.0);
    u_k << stream.uniform(-0.5, 0.5), stream.uniform(-0.5, 0.5);
    const double r1 = stream.uniform(0.05, 0.6);
    const double r2 = stream.uniform(0.05, 0.6);
    auto objective = [&](const Eigen::VectorXd& u) { return (u - target).squaredNorm(); };
    safeopt::ChanceConstraint c;
    c.def = {"g", 0, 0.0, true, 0.1};
    c.epsilon = 0.1;
    c.mismatch_gp = two_point_gp(1e-4);
    safeopt::SolveOptions options;
    options.seed = 100 + static_cast<std::uint64_t>(rep);
    options.n_starts = 4;
    const safeopt::SolveResult result = safeopt::solve_design(
        objective, {c, c}, {table_region(r1), table_region(r2)}, u_k, options);
    CHECK((result.u - u_k).norm() <= std::min(r1, r2) + 1e-8);
  }
}

TEST_CASE("an impossible constraint returns the incumbent flagged infeasible") {
  auto objective = [](const Eigen::VectorXd& u) { return u.squaredNorm(); };
  std::vector<std::function<double(const Eigen::VectorXd&)>> constraints{
      [](const Eigen::VectorXd&) { return 1.0; }};
  Eigen::VectorXd center(2);
  center << 0.2, 0.1;
  safeopt::SolveOptions options;
  options.seed = 11;
  options.n_starts = 3;
  const safeopt::SolveResult result =
      safeopt::solve_penalized(objective, constraints, safeopt::Ball{center, 0.4}, options);
  CHECK_FALSE(result.feasible);
  CHECK((result.u - center).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_SUITE_END();
