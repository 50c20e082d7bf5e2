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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "safedoe/errors.hpp"
#include "safedoe/estimation.hpp"
#include "safedoe/oracles.hpp"
#include "safedoe/rng.hpp"
#include "safedoe/stats.hpp"

using namespace safedoe;

namespace {

// Outlet linear in theta: [theta_a + theta_b * u0] after unit span.
kinetics::KineticModel linear_toy() {
  kinetics::KineticModel m;
  m.name = "linear_toy";
  m.n_species = 1;
  m.n_params = 2;
  m.parameter_names = {"a", "b"};
  m.species_names = {"c"};
  m.rhs = [](const Eigen::VectorXd&, const Eigen::VectorXd& u, const Eigen::VectorXd& th) {
    return Eigen::VectorXd::Constant(1, th[0] + th[1] * u[0]);
  };
  m.inlet = [](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(1); };
  m.span = [](const Eigen::VectorXd&) { return 1.0; };
  return m;
}

// Outlet = (theta_a, theta_b): orthogonal unit sensitivities.
kinetics::KineticModel orthogonal_toy() {
  kinetics::KineticModel m;
  m.name = "orthogonal_toy";
  m.n_species = 2;
  m.n_params = 2;
  m.parameter_names = {"a", "b"};
  m.species_names = {"c1", "c2"};
  m.rhs = [](const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::VectorXd& th) {
    return Eigen::VectorXd(th);
  };
  m.inlet = [](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(2); };
  m.span = [](const Eigen::VectorXd&) { return 1.0; };
  return m;
}

// Mismatch-free plant for estimator calibration: the two-step case-1 model
// is also the truth.
struct NoMismatchToy {
  kinetics::CaseStudy cs;
  Eigen::VectorXd theta_star;

  NoMismatchToy() {
    cs = kinetics::make_case1();
    theta_star.resize(4);
    theta_star << 8.0, 29.0, 5.0, 35.0;
    cs.plant.model = cs.approx_model;
    cs.plant.true_theta = theta_star;
    cs.plant.disturbance = kinetics::DisturbanceKind::None;
  }

  std::vector<kinetics::Measurement> draw(double noise_scale, std::uint64_t seed,
                                          int n_experiments = 5) const {
    kinetics::PlantSpec plant = cs.plant;
    plant.noise_std = noise_scale * kinetics::make_case1().plant.noise_std;
    std::vector<kinetics::Measurement> data;
    for (int i = 0; i < n_experiments; ++i)
      data.push_back(kinetics::run_experiment(plant, cs.constraints,
                                              cs.initial_designs.row(i).transpose(), i,
                                              seed));
    return data;
  }
};

estimation::MleOptions toy_options(const kinetics::CaseStudy& cs, int starts,
                                   std::uint64_t seed) {
  estimation::MleOptions options;
  options.n_multistarts = starts;
  options.theta_lo = cs.theta_lo;
  options.theta_hi = cs.theta_hi;
  options.seed = seed;
  return options;
}

}  // namespace

TEST_SUITE_BEGIN("estimation");

TEST_CASE("noise-free data recovers the generating parameters") {
  const NoMismatchToy toy;
  const auto data = toy.draw(0.0, 1);
  const estimation::MleResult fit =
      estimation::mle_fit(data, toy.cs.approx_model, toy.cs.plant.noise_std, // sigma floor
                          toy_options(toy.cs, 10, 5));
  for (int j = 0; j < 4; ++j)
    CHECK(fit.theta[j] == doctest::Approx(toy.theta_star[j]).epsilon(1e-6));
  CHECK_FALSE(fit.underdetermined);
}

TEST_CASE("fewer observations than parameters is flagged") {
  const NoMismatchToy toy;
  const auto data = toy.draw(1.0, 2, 1);  // 3 observations, 4 parameters
  const estimation::MleResult fit = estimation::mle_fit(
      data, toy.cs.approx_model, toy.cs.plant.noise_std, toy_options(toy.cs, 4, 5));
  CHECK(fit.underdetermined);
  const estimation::PosteriorGaussian posterior = estimation::laplace_posterior(
      fit.theta, data, toy.cs.approx_model, toy.cs.plant.noise_std);
  CHECK(posterior.pseudo_inverse_used);
}

TEST_CASE("preliminary-data fit agrees with an alternate-solver re-solve") {
  const kinetics::CaseStudy cs = kinetics::make_case1();
  std::vector<kinetics::Measurement> data;
  for (int i = 0; i < 5; ++i)
    data.push_back(kinetics::run_experiment(cs.plant, cs.constraints,
                                            cs.initial_designs.row(i).transpose(), i, 42));
  const estimation::MleResult fit = estimation::mle_fit(
      data, cs.approx_model, cs.plant.noise_std, toy_options(cs, 10, 7));
  CHECK(std::isfinite(fit.cost));

  auto objective = [&](const Eigen::VectorXd& theta) {
    Eigen::VectorXd clamped = theta.cwiseMax(cs.theta_lo).cwiseMin(cs.theta_hi);
    try {
      return 0.5 * estimation::weighted_residuals(clamped, data, cs.approx_model,
                                                  cs.plant.noise_std)
                       .squaredNorm();
    } catch (const Error&) {
      return 1e30;
    }
  };
  // Independent route: derivative-free polish from perturbed copies of the
  // solution; it must not find a meaningfully better optimum, and the
  // chi-square values must agree.
  double best = objective(fit.theta);
  rng::Stream stream(3, "nm-starts");
  for (int rep = 0; rep < 3; ++rep) {
    Eigen::VectorXd start = fit.theta;
    for (int j = 0; j < 4; ++j) start[j] *= 1.0 + 0.05 * stream.normal();
    const Eigen::VectorXd polished = oracles::nelder_mead(objective, start, 0.02, 4000);
    best = std::min(best, objective(polished));
  }
  CHECK(fit.cost == doctest::Approx(best).epsilon(1e-6));
}

TEST_CASE("replication shrinks the posterior covariance") {
  const NoMismatchToy toy;
  const auto base = toy.draw(1.0, 3);
  auto doubled = base;
  for (const auto& m : base) doubled.push_back(m);
  const Eigen::VectorXd theta = toy.theta_star;
  const auto p1 = estimation::laplace_posterior(theta, base, toy.cs.approx_model,
                                                toy.cs.plant.noise_std);
  const auto p2 = estimation::laplace_posterior(theta, doubled, toy.cs.approx_model,
                                                toy.cs.plant.noise_std);
  CHECK(p2.covariance.trace() < p1.covariance.trace());
  for (int i = 0; i < 4; ++i)
    CHECK(p2.covariance(i, i) == doctest::Approx(0.5 * p1.covariance(i, i)).epsilon(1e-9));
}

TEST_CASE("linear model reproduces the closed-form least-squares covariance") {
  const kinetics::KineticModel model = linear_toy();
  std::vector<kinetics::Measurement> data;
  for (double x : {0.0, 1.0, 2.0, 3.0}) {
    kinetics::Measurement m;
    m.u = Eigen::VectorXd::Constant(1, x);
    m.y = Eigen::VectorXd::Constant(1, 1.0 + 2.0 * x);
    m.index = static_cast<int>(x);
    data.push_back(m);
  }
  const Eigen::VectorXd sigma = Eigen::VectorXd::Constant(1, 0.5);
  Eigen::VectorXd theta(2);
  theta << 1.0, 2.0;
  const auto posterior = estimation::laplace_posterior(theta, data, model, sigma);
  // frozen closed form: sigma^2 (X^T X)^{-1}
  CHECK(posterior.covariance(0, 0) == doctest::Approx(0.175).epsilon(1e-6));
  CHECK(posterior.covariance(0, 1) == doctest::Approx(-0.075).epsilon(1e-6));
  CHECK(posterior.covariance(1, 1) == doctest::Approx(0.05).epsilon(1e-6));
}

TEST_CASE("orthogonal sensitivities give a diagonal covariance") {
  const kinetics::KineticModel model = orthogonal_toy();
  std::vector<kinetics::Measurement> data;
  for (int i = 0; i < 3; ++i) {
    kinetics::Measurement m;
    m.u = Eigen::VectorXd::Zero(1);
    m.y.resize(2);
    m.y << 1.5, -0.5;
    m.index = i;
    data.push_back(m);
  }
  Eigen::VectorXd theta(2);
  theta << 1.5, -0.5;
  const Eigen::VectorXd sigma = Eigen::VectorXd::Constant(2, 0.1);
  const auto posterior = estimation::laplace_posterior(theta, data, model, sigma);
  CHECK(std::abs(posterior.covariance(0, 1)) <
        1e-6 * std::abs(posterior.covariance(0, 0)));
}

TEST_CASE("adequacy statistics behave on canonical fixtures") {
  const kinetics::KineticModel model = orthogonal_toy();
  const Eigen::VectorXd sigma = Eigen::VectorXd::Constant(2, 0.1);
  Eigen::VectorXd theta(2);
  theta << 1.5, -0.5;
  const Eigen::VectorXd exact = kinetics::integrate(model, Eigen::VectorXd::Zero(1), theta);

  SUBCASE("zero residuals pass the chi-square test") {
    std::vector<kinetics::Measurement> data;
    for (int i = 0; i < 3; ++i) {
      kinetics::Measurement m;
      m.u = Eigen::VectorXd::Zero(1);
      m.y = exact;
      m.index = i;
      data.push_back(m);
    }
    const auto posterior = estimation::laplace_posterior(theta, data, model, sigma);
    const auto report = estimation::statistics(theta, posterior, data, model, sigma);
    CHECK(report.chi2_sample == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(report.chi2_pass);
  }

  SUBCASE("one residual equal to its sigma gives chi2 of one") {
    std::vector<kinetics::Measurement> data;
    for (int i = 0; i < 3; ++i) {
      kinetics::Measurement m;
      m.u = Eigen::VectorXd::Zero(1);
      m.y = exact;
      if (i == 0) m.y[0] += sigma[0];
      m.index = i;
      data.push_back(m);
    }
    const auto posterior = estimation::laplace_posterior(theta, data, model, sigma);
    const auto report = estimation::statistics(theta, posterior, data, model, sigma);
    CHECK(report.chi2_sample == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("too few degrees of freedom is an error") {
    std::vector<kinetics::Measurement> data;
    kinetics::Measurement m;
    m.u = Eigen::VectorXd::Zero(1);
    m.y = exact;
    data.push_back(m);  // 2 observations, 2 parameters -> dof 0
    const auto posterior = estimation::laplace_posterior(theta, data, model, sigma);
    CHECK_THROWS_AS(estimation::statistics(theta, posterior, data, model, sigma), Error);
  }
}

TEST_CASE("the dof-56 reference quantile matches the published level") {
  CHECK(stats::chi_squared_quantile(0.95, 56) == doctest::Approx(74.47).epsilon(7e-4));
}

TEST_CASE("quantiles agree with an independent quadrature route") {
  // frozen external references plus the quadrature oracle
  struct Row {
    double p, dof, chi2, t;
  };
  const Row rows[] = {
      {0.95, 5, 11.070497693516351, 2.570581835636314},
      {0.95, 10, 18.307038053275146, 2.2281388519649385},
      {0.95, 56, 74.46832415930936, 2.003240718847872},
      {0.99, 100, 135.80672317102676, 2.6258905214380177},
      {0.90, 17, 24.76903534390146, 1.7396067260750672},
  };
  for (const Row& row : rows) {
    CHECK(stats::chi_squared_quantile(row.p, row.dof) ==
          doctest::Approx(row.chi2).epsilon(1e-3));
    CHECK(oracles::chi_squared_quantile(row.p, row.dof) ==
          doctest::Approx(row.chi2).epsilon(1e-3));
    // t quantiles tabulated two-sided: level 1 - alpha/2 with alpha = 1 - p
    CHECK(stats::student_t_quantile(1.0 - 0.5 * (1.0 - row.p), row.dof) ==
          doctest::Approx(row.t).epsilon(1e-3));
    CHECK(oracles::student_t_quantile(1.0 - 0.5 * (1.0 - row.p), row.dof) ==
          doctest::Approx(row.t).epsilon(1e-3));
  }
}

TEST_CASE("estimation error shrinks with the noise level") {
  const NoMismatchToy toy;
  std::vector<double> medians;
  for (double scale : {1.0, 0.1, 0.01}) {
    std::vector<double> errors;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto data = toy.draw(scale, 100 + seed);
      estimation::MleOptions options = toy_options(toy.cs, 3, seed);
      options.warm_start = toy.theta_star;  // calibration test, not a search test
      const auto fit =
          estimation::mle_fit(data, toy.cs.approx_model, toy.cs.plant.noise_std, options);
      errors.push_back((fit.theta - toy.theta_star).norm() / toy.theta_star.norm());
    }
    std::sort(errors.begin(), errors.end());
    medians.push_back(errors[errors.size() / 2]);
  }
  CHECK(medians[1] < medians[0]);
  CHECK(medians[2] < medians[1]);
}

TEST_CASE("wald ellipsoid covers the truth at roughly the nominal rate") {
  const NoMismatchToy toy;
  const double noise_scale = 0.002;  // near-asymptotic regime
  const Eigen::VectorXd noise = noise_scale * toy.cs.plant.noise_std;
  const double quantile = stats::chi_squared_quantile(0.95, 4);
  int covered = 0;
  const int reps = 200;
  for (int rep = 0; rep < reps; ++rep) {
    const auto data = toy.draw(noise_scale, 500 + static_cast<std::uint64_t>(rep), 4);
    estimation::MleOptions options = toy_options(toy.cs, 1, static_cast<std::uint64_t>(rep));
    options.warm_start = toy.theta_star;
    const auto fit = estimation::mle_fit(data, toy.cs.approx_model, noise, options);
    const auto posterior =
        estimation::laplace_posterior(fit.theta, data, toy.cs.approx_model, noise);
    const Eigen::VectorXd diff = toy.theta_star - fit.theta;
    const double mahalanobis = diff.dot(posterior.covariance.ldlt().solve(diff));
    if (mahalanobis <= quantile) ++covered;
  }
  CHECK(static_cast<double>(covered) / reps >= 0.88);
}

TEST_SUITE_END();
