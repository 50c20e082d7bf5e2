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

#include <cmath>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "commands.hpp"
#include "safedoe/design_objective.hpp"
#include "safedoe/errors.hpp"
#include "safedoe/gp.hpp"
#include "safedoe/kinetics.hpp"
#include "safedoe/oracles.hpp"
#include "safedoe/rng.hpp"
#include "safedoe/safe_opt.hpp"
#include "safedoe/stats.hpp"

namespace safedoe::cli {

namespace {

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

void print_pair(const char* label, double oracle, double library) {
  std::cout << label << ": oracle " << oracle << " | library " << library
            << " | rel err " << rel_err(oracle, library) << "\n";
}

int oracle_cantelli(const OracleArgs& args) {
  if (args.values.empty()) {
    std::cerr << "usage: safedoe oracle cantelli <epsilon>\n";
    return kExitSchema;
  }
  const double eps = std::stod(args.values[0]);
  const double direct = std::sqrt((1.0 - eps) / eps);
  print_pair("r", direct, safeopt::cantelli_r(eps));
  return 0;
}

oracles::TwoPointGp default_two_point_fixture() {
  oracles::TwoPointGp f;
  f.spec.family = gp::KernelFamily::SquaredExponential;
  f.spec.signal_variance = 2.0;
  f.spec.inv_sq_lengthscales = Eigen::VectorXd::Constant(1, 0.8);
  f.spec.noise_variance = 0.1;
  f.x1 = Eigen::VectorXd::Constant(1, 0.3);
  f.x2 = Eigen::VectorXd::Constant(1, 1.2);
  f.y1 = 0.5;
  f.y2 = -0.7;
  return f;
}

int oracle_gp2pt(const OracleArgs& args) {
  oracles::TwoPointGp fixture = default_two_point_fixture();
  Eigen::VectorXd x_star = Eigen::VectorXd::Constant(1, 0.75);
  if (!args.fixture.empty()) {
    std::ifstream in(args.fixture);
    if (!in) {
      std::cerr << "cannot open fixture " << args.fixture << "\n";
      return kExitSchema;
    }
    nlohmann::json j;
    in >> j;
    const auto vec = [](const nlohmann::json& a) {
      Eigen::VectorXd v(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i];
      return v;
    };
    fixture.spec.family = gp::kernel_family_from_name(j.value("family", "se"));
    fixture.spec.signal_variance = j.at("signal_variance");
    fixture.spec.inv_sq_lengthscales = vec(j.at("inv_sq_lengthscales"));
    fixture.spec.noise_variance = j.value("noise_variance", 0.0);
    fixture.x1 = vec(j.at("x1"));
    fixture.x2 = vec(j.at("x2"));
    fixture.y1 = j.at("y1");
    fixture.y2 = j.at("y2");
    x_star = vec(j.at("x_star"));
  }

  Eigen::MatrixXd inputs(2, fixture.x1.size());
  inputs.row(0) = fixture.x1.transpose();
  inputs.row(1) = fixture.x2.transpose();
  Eigen::VectorXd targets(2);
  targets << fixture.y1, fixture.y2;
  const gp::GpModel model =
      gp::GpModel::with_hyperparameters(inputs, targets, fixture.spec);
  const gp::Prediction lib = model.predict(x_star);
  const oracles::MeanVar closed = oracles::gp_two_point_closed_form(fixture, x_star);
  print_pair("mean", closed.mean, lib.mean);
  print_pair("variance", closed.variance, lib.variance);
  return 0;
}

int oracle_mc_propagate(const OracleArgs& args) {
  // sin fixture: 20 noisy samples on [-3, 3], random test input N(0.1, 0.01).
  rng::Stream noise(42, "oracle-sin");
  Eigen::MatrixXd inputs(20, 1);
  Eigen::VectorXd targets(20);
  for (int i = 0; i < 20; ++i) {
    const double x = -3.0 + 6.0 * i / 19.0;
    inputs(i, 0) = x;
    targets[i] = std::sin(x) + 0.01 * noise.normal();
  }
  gp::HyperFitConfig cfg;
  cfg.seed = 42;
  const gp::GpModel model =
      gp::GpModel::fit(inputs, targets, gp::KernelFamily::SquaredExponential, {}, cfg);

  const Eigen::VectorXd mu = Eigen::VectorXd::Constant(1, 0.1);
  const Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(1, 1, 0.01);
  const design::GaussianMoments lib =
      design::propagate_gaussian_input(model, mu, sigma, {0}, 1e-4 * 6.0);
  const oracles::MeanVar mc = oracles::mc_propagate(model, mu, sigma, args.samples, 7);
  print_pair("mean", mc.mean, lib.mean);
  print_pair("variance", mc.variance, lib.variance);
  return 0;
}

int oracle_fd_sens(const OracleArgs&) {
  const kinetics::CaseStudy cs = kinetics::make_case1();
  const Eigen::VectorXd u = cs.initial_designs.row(0).transpose();
  const Eigen::VectorXd theta = cs.plant.true_theta;
  const Eigen::MatrixXd lib = kinetics::sensitivities(cs.plant.model, u, theta);

  Eigen::MatrixXd reference(lib.rows(), lib.cols());
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    const double h = 1e-6 * std::abs(theta[j]);
    Eigen::VectorXd tp = theta, tm = theta;
    tp[j] += h;
    tm[j] -= h;
    reference.col(j) = (kinetics::integrate_adaptive(cs.plant.model, u, tp, 1e-10) -
                        kinetics::integrate_adaptive(cs.plant.model, u, tm, 1e-10)) /
                       (2.0 * h);
  }
  double worst = 0.0;
  for (Eigen::Index i = 0; i < lib.rows(); ++i)
    for (Eigen::Index j = 0; j < lib.cols(); ++j)
      worst = std::max(worst, rel_err(reference(i, j), lib(i, j)));
  std::cout << "sensitivity matrix " << lib.rows() << "x" << lib.cols()
            << ": worst relative deviation vs central-difference reference " << worst
            << "\n";
  return 0;
}

int oracle_quantiles(const OracleArgs& args) {
  if (args.values.size() < 2) {
    std::cerr << "usage: safedoe oracle quantiles <p> <dof>\n";
    return kExitSchema;
  }
  const double p = std::stod(args.values[0]);
  const double dof = std::stod(args.values[1]);
  print_pair("chi2", oracles::chi_squared_quantile(p, dof),
             stats::chi_squared_quantile(p, dof));
  print_pair("student_t", oracles::student_t_quantile(p, dof),
             stats::student_t_quantile(p, dof));
  return 0;
}

}  // namespace

int cmd_oracle(const OracleArgs& args) {
  try {
    if (args.name == "cantelli") return oracle_cantelli(args);
    if (args.name == "gp2pt") return oracle_gp2pt(args);
    if (args.name == "mc-propagate") return oracle_mc_propagate(args);
    if (args.name == "fd-sens") return oracle_fd_sens(args);
    if (args.name == "quantiles") return oracle_quantiles(args);
  } catch (const Error& e) {
    std::cerr << "oracle error: " << e.what() << "\n";
    return kExitRuntime;
  }
  std::cerr << "unknown oracle: " << args.name << "\n";
  return kExitSchema;
}

}  // namespace safedoe::cli
