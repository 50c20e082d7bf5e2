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
#include <cmath>

#include "safedoe/design_objective.hpp"
#include "safedoe/oracles.hpp"
#include "safedoe/rng.hpp"

using namespace safedoe;

namespace {

kinetics::KineticModel inert_model() {
  kinetics::KineticModel m;
  m.name = "inert";
  m.n_species = 2;
  m.n_params = 3;
  m.parameter_names = {"a", "b", "c"};
  m.species_names = {"c1", "c2"};
  m.rhs = [](const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return Eigen::VectorXd::Zero(2);
  };
  m.inlet = [](const Eigen::VectorXd&) {
    Eigen::VectorXd c(2);
    c << 1.0, 0.5;
    return c;
  };
  m.span = [](const Eigen::VectorXd&) { return 1.0; };
  return m;
}

estimation::PosteriorGaussian case1_posterior() {
  estimation::PosteriorGaussian p;
  p.mean.resize(4);
  p.mean << 6.5, 28.0, 0.05, 15.0;
  p.covariance = Eigen::MatrixXd::Zero(4, 4);
  p.covariance.diagonal() << 0.25, 1.0, 1e-4, 1.0;
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("design");

TEST_CASE("fim reduces to the prior information for an insensitive model") {
  const kinetics::KineticModel model = inert_model();
  design::FimSpec spec = design::FimSpec::from_noise(Eigen::VectorXd::Constant(2, 0.1), 3);
  spec.prior_information = Eigen::MatrixXd::Identity(3, 3) * 2.5;
  const Eigen::MatrixXd fim = design::fim(model, Eigen::VectorXd::Zero(1),
                                          Eigen::VectorXd::Ones(3), spec);
  CHECK((fim - spec.prior_information).lpNorm<Eigen::Infinity>() < 1e-20);
}

TEST_CASE("information is additive over repeated experiments") {
  const kinetics::CaseStudy cs = kinetics::make_case1();
  const Eigen::VectorXd u = cs.initial_designs.row(0).transpose();
  const Eigen::VectorXd theta = case1_posterior().mean;
  design::FimSpec spec = design::FimSpec::from_noise(cs.plant.noise_std, 4);
  const Eigen::MatrixXd single = design::fim(cs.approx_model, u, theta, spec);
  spec.prior_information = single;
  const Eigen::MatrixXd stacked = design::fim(cs.approx_model, u, theta, spec);
  CHECK((stacked - 2.0 * single).lpNorm<Eigen::Infinity>() <
        1e-10 * single.lpNorm<Eigen::Infinity>());
}

TEST_CASE("fim matches an independent finite-difference pipeline") {
  const kinetics::CaseStudy cs = kinetics::make_case1();
  const Eigen::VectorXd u = cs.initial_designs.row(0).transpose();
  const Eigen::VectorXd theta = case1_posterior().mean;
  const design::FimSpec spec = design::FimSpec::from_noise(cs.plant.noise_std, 4);
  const Eigen::MatrixXd lib = design::fim(cs.approx_model, u, theta, spec);

  Eigen::MatrixXd jac(3, 4);
  for (int j = 0; j < 4; ++j) {
    const double h = 1e-6 * std::abs(theta[j]);
    Eigen::VectorXd tp = theta, tm = theta;
    tp[j] += h;
    tm[j] -= h;
    jac.col(j) = (kinetics::integrate_adaptive(cs.approx_model, u, tp, 1e-11) -
                  kinetics::integrate_adaptive(cs.approx_model, u, tm, 1e-11)) /
                 (2.0 * h);
  }
  const Eigen::MatrixXd reference =
      jac.transpose() * spec.sigma_exp_inv_diag.asDiagonal() * jac;
  CHECK((lib - reference).norm() < 2e-3 * reference.norm());
}

TEST_CASE("d-metric canonical values and the eigenvalue route") {
  CHECK(std::abs(design::d_metric(Eigen::MatrixXd::Identity(2, 2))) < 1e-9);
  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(2, 2);
  diag.diagonal() << 2.0, 3.0;
  CHECK(design::d_metric(diag) == doctest::Approx(-1.791759469228055).epsilon(1e-9));

  rng::Stream stream(5, "dmetric");
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::MatrixXd r(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) r(i, j) = stream.normal();
    const Eigen::MatrixXd pd =
        r.transpose() * r + Eigen::MatrixXd::Identity(4, 4);
    const double via_eigen = -oracles::log_det_eigen(pd);
    CHECK(std::abs(design::d_metric(pd) - via_eigen) <
          1e-10 * std::max(1.0, std::abs(via_eigen)) + 1e-9);

    // order invariance under a symmetric permutation
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(4);
    perm.setIdentity();
    std::swap(perm.indices()[0], perm.indices()[3]);
    const Eigen::MatrixXd permuted = perm.transpose() * pd * perm;
    CHECK(design::d_metric(permuted) == doctest::Approx(design::d_metric(pd)).epsilon(1e-12));
  }
}

TEST_CASE("scaling the weighting matrix leaves the argmin unchanged") {
  const kinetics::CaseStudy cs = kinetics::make_case1();
  const Eigen::VectorXd theta = case1_posterior().mean;
  design::FimSpec spec = design::FimSpec::from_noise(cs.plant.noise_std, 4);
  design::FimSpec scaled = spec;
  scaled.sigma_exp_inv_diag *= 5.0;

  int argmin_a = -1, argmin_b = -1;
  double best_a = 1e300, best_b = 1e300;
  int index = 0;
  for (double t : {60.0, 80.0, 100.0}) {
    for (double f : {0.004, 0.006, 0.008}) {
      Eigen::VectorXd u(2);
      u << t, f;
      const double ja = design::d_metric(design::fim(cs.approx_model, u, theta, spec));
      const double jb = design::d_metric(design::fim(cs.approx_model, u, theta, scaled));
      if (ja < best_a) {
        best_a = ja;
        argmin_a = index;
      }
      if (jb < best_b) {
        best_b = jb;
        argmin_b = index;
      }
      ++index;
    }
  }
  CHECK(argmin_a == argmin_b);
}

TEST_CASE("a forced-constant objective is reproduced with vanishing variance") {
  const kinetics::KineticModel model = inert_model();
  kinetics::DesignBounds bounds;
  bounds.lo = Eigen::VectorXd::Constant(1, -1.0);
  bounds.hi = Eigen::VectorXd::Constant(1, 1.0);
  bounds.names = {"u"};
  estimation::PosteriorGaussian posterior;
  posterior.mean = Eigen::VectorXd::Ones(3);
  posterior.covariance = 0.01 * Eigen::MatrixXd::Identity(3, 3);
  design::FimSpec spec = design::FimSpec::from_noise(Eigen::VectorXd::Constant(2, 0.1), 3);
  spec.prior_information = Eigen::MatrixXd::Identity(3, 3);

  design::SurrogateConfig cfg;
  cfg.n_points = 40;
  cfg.seed = 2;
  const auto surrogate = design::ObjectiveSurrogate::train(
      model, bounds, posterior, Eigen::VectorXd::Constant(3, 0.5),
      Eigen::VectorXd::Constant(3, 1.5), spec, cfg);
  const double constant = surrogate.training_values()[0];
  for (double u = -0.8; u <= 0.8; u += 0.4) {
    const auto m = surrogate.predict(Eigen::VectorXd::Constant(1, u), posterior.mean);
    CHECK(std::abs(m.mean - constant) < 1e-6 * std::max(1.0, std::abs(constant)));
    CHECK(m.variance < 1e-8);
  }
}

TEST_CASE("surrogate generalizes to held-out in-silico points") {
  const kinetics::CaseStudy cs = kinetics::make_case1();
  const estimation::PosteriorGaussian posterior = case1_posterior();
  design::FimSpec spec = design::FimSpec::from_noise(cs.plant.noise_std, 4);
  design::SurrogateConfig cfg;
  cfg.n_points = 200;
  cfg.seed = 11;
  const auto surrogate = design::ObjectiveSurrogate::train(
      cs.approx_model, cs.bounds, posterior, cs.theta_lo, cs.theta_hi, spec, cfg);
  CHECK(surrogate.training_values().size() == 200);

  // sample std of the training values
  const Eigen::VectorXd& J = surrogate.training_values();
  const double mean = J.mean();
  const double sd = std::sqrt((J.array() - mean).square().sum() / J.size());

  rng::Stream stream(12, "holdout");
  Eigen::VectorXd lo(6), hi(6);
  lo.head(2) = cs.bounds.lo;
  hi.head(2) = cs.bounds.hi;
  for (int j = 0; j < 4; ++j) {
    const double half = 3.0 * std::sqrt(posterior.covariance(j, j));
    lo[2 + j] = std::max(posterior.mean[j] - half, cs.theta_lo[j]);
    hi[2 + j] = std::min(posterior.mean[j] + half, cs.theta_hi[j]);
  }
  const Eigen::MatrixXd holdout = rng::latin_hypercube(20, lo, hi, stream);
  double sse = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd u = holdout.row(i).head(2).transpose();
    const Eigen::VectorXd theta = holdout.row(i).tail(4).transpose();
    const double truth = design::d_metric(design::fim(cs.approx_model, u, theta, spec));
    const double predicted = surrogate.predict(u, theta).mean;
    sse += (predicted - truth) * (predicted - truth);
  }
  const double rmse = std::sqrt(sse / 20.0);
  CHECK(rmse < 0.10 * sd);
}

TEST_CASE("propagation with zero parameter uncertainty is the plain prediction") {
  const kinetics::CaseStudy cs = kinetics::make_case1();
  const estimation::PosteriorGaussian posterior = case1_posterior();
  design::FimSpec spec = design::FimSpec::from_noise(cs.plant.noise_std, 4);
  design::SurrogateConfig cfg;
  cfg.n_points = 80;
  cfg.seed = 4;
  const auto surrogate = design::ObjectiveSurrogate::train(
      cs.approx_model, cs.bounds, posterior, cs.theta_lo, cs.theta_hi, spec, cfg);
  const Eigen::VectorXd u = cs.initial_designs.row(1).transpose();
  const auto plain = surrogate.predict(u, posterior.mean);
  const auto propagated =
      surrogate.propagate(u, posterior.mean, Eigen::MatrixXd::Zero(4, 4));
  CHECK(propagated.mean == plain.mean);
  CHECK(propagated.variance == plain.variance);
}

TEST_CASE("sin-fixture moments agree with a monte-carlo oracle") {
  rng::Stream noise(42, "oracle-sin");
  Eigen::MatrixXd X(20, 1);
  Eigen::VectorXd y(20);
  for (int i = 0; i < 20; ++i) {
    X(i, 0) = -3.0 + 6.0 * i / 19.0;
    y[i] = std::sin(X(i, 0)) + 0.01 * noise.normal();
  }
  gp::HyperFitConfig cfg;
  cfg.seed = 42;
  const gp::GpModel model =
      gp::GpModel::fit(X, y, gp::KernelFamily::SquaredExponential, {}, cfg);

  const Eigen::VectorXd mu = Eigen::VectorXd::Constant(1, 0.1);
  const Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(1, 1, 0.01);
  const auto lib = design::propagate_gaussian_input(model, mu, sigma, {0}, 6e-4);
  const auto mc = oracles::mc_propagate(model, mu, sigma, 100000, 7);
  CHECK(std::abs(lib.mean - mc.mean) <= 0.15 * std::max(std::abs(mc.mean), 1e-6));
  CHECK(std::abs(lib.variance - mc.variance) <= 0.15 * mc.variance);

  // exact degeneration at zero input variance
  const auto degenerate = design::propagate_gaussian_input(
      model, mu, Eigen::MatrixXd::Zero(1, 1), {0}, 6e-4);
  const gp::Prediction plain = model.predict(mu);
  CHECK(std::abs(degenerate.mean - plain.mean) <= 1e-12);
  CHECK(std::abs(degenerate.variance - plain.variance) <= 1e-12);
}

TEST_CASE("variance inflation equals the quadratic form on a smooth model") {
  // Long lengthscale makes the posterior mean effectively linear, so the
  // first-order term dominates and matches the explicit quadratic form.
  gp::KernelSpec spec;
  spec.family = gp::KernelFamily::SquaredExponential;
  spec.signal_variance = 4.0;
  spec.inv_sq_lengthscales = Eigen::VectorXd::Constant(1, 1e-4);
  spec.noise_variance = 1e-6;
  Eigen::MatrixXd X(4, 1);
  X << -2.0, -1.0, 1.0, 2.0;
  Eigen::VectorXd y = 0.7 * X.col(0);
  const gp::GpModel model = gp::GpModel::with_hyperparameters(X, y, spec);

  const Eigen::VectorXd mu = Eigen::VectorXd::Constant(1, 0.3);
  const Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(1, 1, 0.04);
  const auto lib = design::propagate_gaussian_input(model, mu, sigma, {0}, 1e-4);

  auto mean_fn = [&](const Eigen::VectorXd& p) { return model.predict(p).mean; };
  auto var_fn = [&](const Eigen::VectorXd& p) { return model.predict(p).variance; };
  const double grad = oracles::fd_gradient(mean_fn, mu, 1e-5)[0];
  const double hess = oracles::fd_hessian(var_fn, mu, 1e-3)(0, 0);
  const double expected =
      model.predict(mu).variance + 0.5 * hess * 0.04 + grad * 0.04 * grad;
  CHECK(lib.variance == doctest::Approx(expected).epsilon(1e-3));

  // scaling the input covariance never shrinks the propagated variance here
  const auto doubled = design::propagate_gaussian_input(model, mu, 2.0 * sigma, {0}, 1e-4);
  CHECK(doubled.variance >= lib.variance - 1e-12);
}

TEST_CASE("propagated variance dominates the plain variance when terms are benign") {
  rng::Stream noise(42, "oracle-sin");
  Eigen::MatrixXd X(20, 1);
  Eigen::VectorXd y(20);
  for (int i = 0; i < 20; ++i) {
    X(i, 0) = -3.0 + 6.0 * i / 19.0;
    y[i] = std::sin(X(i, 0)) + 0.01 * noise.normal();
  }
  gp::HyperFitConfig cfg;
  cfg.seed = 42;
  const gp::GpModel model =
      gp::GpModel::fit(X, y, gp::KernelFamily::SquaredExponential, {}, cfg);
  auto var_fn = [&](const Eigen::VectorXd& p) { return model.predict(p).variance; };
  rng::Stream stream(8, "dominate");
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::VectorXd mu = Eigen::VectorXd::Constant(1, stream.uniform(-2.5, 2.5));
    const Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(1, 1, 0.01);
    const double trace_term = 0.5 * oracles::fd_hessian(var_fn, mu, 1e-3)(0, 0) * 0.01;
    const auto moments = design::propagate_gaussian_input(model, mu, sigma, {0}, 6e-4);
    if (trace_term >= 0.0)
      CHECK(moments.variance >= model.predict(mu).variance - 1e-12);
  }
}

TEST_SUITE_END();
