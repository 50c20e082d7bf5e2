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

#include "safedoe/kinetics.hpp"

#include <cmath>
#include <sstream>

#include "safedoe/errors.hpp"
#include "safedoe/rng.hpp"

namespace safedoe::kinetics {

namespace {

constexpr double kGasConstant = 8.31446261815324;  // J / (mol K)
constexpr double kReferenceTempK = 90.0 + 273.15;

std::string point_to_string(const Eigen::VectorXd& v) {
  std::ostringstream os;
  os << "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << "]";
  return os.str();
}

[[noreturn]] void throw_integration_failure(const KineticModel& model,
                                            const Eigen::VectorXd& u,
                                            const Eigen::VectorXd& theta,
                                            const std::string& what) {
  throw Error(ErrorCode::IntegrationFailure,
              model.name + ": " + what + " at u=" + point_to_string(u) +
                  ", theta=" + point_to_string(theta));
}

}  // namespace

bool DesignBounds::contains(const Eigen::VectorXd& u, double tol) const {
  if (u.size() != dim()) return false;
  return ((u.array() >= lo.array() - tol) && (u.array() <= hi.array() + tol)).all();
}

Eigen::VectorXd DesignBounds::normalize(const Eigen::VectorXd& u) const {
  return (2.0 * (u - lo).array() / (hi - lo).array() - 1.0).matrix();
}

Eigen::VectorXd DesignBounds::denormalize(const Eigen::VectorXd& z) const {
  return (lo.array() + 0.5 * (z.array() + 1.0) * (hi - lo).array()).matrix();
}

double arrhenius_standard(double k0, double ea_kj_mol, double t_celsius) {
  return k0 * std::exp(-ea_kj_mol * 1e3 / (kGasConstant * (t_celsius + 273.15)));
}

double arrhenius_centered(double k_ref, double ea_kj_mol, double t_celsius) {
  const double inv_t = 1.0 / (t_celsius + 273.15);
  return k_ref * std::exp(-ea_kj_mol * 1e3 / kGasConstant * (inv_t - 1.0 / kReferenceTempK));
}

double arrhenius(Parametrization p, double k0, double ea_kj_mol, double t_celsius) {
  return p == Parametrization::StandardArrhenius
             ? arrhenius_standard(k0, ea_kj_mol, t_celsius)
             : arrhenius_centered(k0, ea_kj_mol, t_celsius);
}

Eigen::VectorXd integrate(const KineticModel& model, const Eigen::VectorXd& u,
                          const Eigen::VectorXd& theta, int n_steps) {
  if (n_steps < 1)
    throw Error(ErrorCode::InvalidArgument, "integrate: n_steps must be >= 1");
  Eigen::VectorXd c = model.inlet(u);
  const double length = model.span(u);
  const double h = length / static_cast<double>(n_steps);
  const KineticModel::BoundRhs rhs = model.bind(u, theta);
  const Eigen::Index n = c.size();
  Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), stage(n);
  for (int step = 0; step < n_steps; ++step) {
    rhs(c, k1);
    stage = c + (0.5 * h) * k1;
    rhs(stage, k2);
    stage = c + (0.5 * h) * k2;
    rhs(stage, k3);
    stage = c + h * k3;
    rhs(stage, k4);
    c += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!c.allFinite())
      throw_integration_failure(model, u, theta,
                                "state became non-finite during RK4 step " +
                                    std::to_string(step));
  }
  return c;
}

Eigen::VectorXd integrate_adaptive(const KineticModel& model, const Eigen::VectorXd& u,
                                   const Eigen::VectorXd& theta, double rel_tol) {
  Eigen::VectorXd c = model.inlet(u);
  const double length = model.span(u);
  const KineticModel::BoundRhs rhs = model.bind(u, theta);
  double t = 0.0;
  double h = length / 16.0;
  const double abs_tol = rel_tol;
  int steps = 0;
  while (t < length) {
    if (++steps > 1000000)
      throw_integration_failure(model, u, theta, "adaptive integrator stalled");
    if (t + h > length) h = length - t;

    Eigen::VectorXd k1(c.size()), k2(c.size()), k3(c.size()), k4(c.size()),
        k5(c.size()), k6(c.size()), stage(c.size());
    rhs(c, k1);
    stage = c + h * (0.25 * k1);
    rhs(stage, k2);
    stage = c + h * ((3.0 / 32.0) * k1 + (9.0 / 32.0) * k2);
    rhs(stage, k3);
    stage = c + h * ((1932.0 / 2197.0) * k1 - (7200.0 / 2197.0) * k2 +
                     (7296.0 / 2197.0) * k3);
    rhs(stage, k4);
    stage = c + h * ((439.0 / 216.0) * k1 - 8.0 * k2 + (3680.0 / 513.0) * k3 -
                     (845.0 / 4104.0) * k4);
    rhs(stage, k5);
    stage = c + h * (-(8.0 / 27.0) * k1 + 2.0 * k2 - (3544.0 / 2565.0) * k3 +
                     (1859.0 / 4104.0) * k4 - (11.0 / 40.0) * k5);
    rhs(stage, k6);

    const Eigen::VectorXd c5 =
        c + h * ((16.0 / 135.0) * k1 + (6656.0 / 12825.0) * k3 +
                 (28561.0 / 56430.0) * k4 - (9.0 / 50.0) * k5 + (2.0 / 55.0) * k6);
    const Eigen::VectorXd c4 =
        c + h * ((25.0 / 216.0) * k1 + (1408.0 / 2565.0) * k3 +
                 (2197.0 / 4104.0) * k4 - (1.0 / 5.0) * k5);
    if (!c5.allFinite())
      throw_integration_failure(model, u, theta, "state became non-finite (adaptive)");

    const double scale = abs_tol + rel_tol * c.cwiseAbs().maxCoeff();
    const double err = (c5 - c4).cwiseAbs().maxCoeff() / scale;
    if (err <= 1.0) {
      t += h;
      c = c5;
    }
    const double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 4.0;
    h *= std::min(4.0, std::max(0.1, factor));
    if (h < length * 1e-14)
      throw_integration_failure(model, u, theta, "adaptive step underflow");
  }
  return c;
}

Eigen::MatrixXd sensitivities(const KineticModel& model, const Eigen::VectorXd& u,
                              const Eigen::VectorXd& theta, int n_steps) {
  const Eigen::VectorXd base = integrate(model, u, theta, n_steps);
  Eigen::MatrixXd jac(base.size(), theta.size());
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    double h = 1e-6 * std::abs(theta[j]);
    if (h == 0.0) h = 1e-6;
    Eigen::VectorXd theta_p = theta;
    theta_p[j] += h;
    jac.col(j) = (integrate(model, u, theta_p, n_steps) - base) / h;
  }
  return jac;
}

void PlantSpec::validate() const {
  if ((noise_std.array() < 0.0).any())
    throw Error(ErrorCode::InvalidArgument, "plant noise stds must be >= 0");
  if (noise_std.size() != model.n_species)
    throw Error(ErrorCode::DimensionMismatch,
                "plant noise_std size must match the number of measured outputs");
  if (true_theta.size() != model.n_params)
    throw Error(ErrorCode::DimensionMismatch, "plant true_theta size mismatch");
}

Measurement run_experiment(const PlantSpec& plant,
                           const std::vector<ConstraintDef>& constraints,
                           const Eigen::VectorXd& u, int index,
                           std::uint64_t master_seed) {
  Eigen::VectorXd y = integrate(plant.model, u, plant.true_theta, plant.integrator_steps);
  switch (plant.disturbance) {
    case DisturbanceKind::None:
      break;
    case DisturbanceKind::AdditiveAll:
      y.array() += plant.disturbance_value;
      break;
    case DisturbanceKind::MultiplicativeOutput:
      y[plant.disturbance_output] *= plant.disturbance_value;
      break;
  }
  rng::Stream noise(master_seed, "plant-noise", static_cast<std::uint64_t>(index));
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += plant.noise_std[i] * noise.normal();

  Measurement m;
  m.u = u;
  m.y = y;
  m.g.resize(static_cast<Eigen::Index>(constraints.size()));
  for (std::size_t i = 0; i < constraints.size(); ++i)
    m.g[static_cast<Eigen::Index>(i)] = constraints[i].value(y);
  m.index = index;
  return m;
}

namespace {

// Plug-flow balance: dc/dz = (A/F) * S r(c, T), z in [0, L].
KineticModel case1_model(bool include_parallel_path) {
  constexpr double kLengthCm = 25.0;
  constexpr double kAreaCm2 = 1.2;
  KineticModel model;
  model.name = include_parallel_path ? "case1_true" : "case1_approx";
  model.n_species = 3;
  model.n_params = include_parallel_path ? 6 : 4;
  model.parametrization = Parametrization::StandardArrhenius;
  model.species_names = {"cA", "cB", "cC"};
  model.parameter_names = include_parallel_path
                              ? std::vector<std::string>{"k0_1", "Ea_1", "k0_2",
                                                         "Ea_2", "k0_3", "Ea_3"}
                              : std::vector<std::string>{"k0_1", "Ea_1", "k0_2", "Ea_2"};
  model.rhs = [include_parallel_path](const Eigen::VectorXd& c, const Eigen::VectorXd& u,
                                      const Eigen::VectorXd& theta) {
    const double temp = u[0];
    const double flow = u[1];  // mL/min
    const double k1 = arrhenius_standard(theta[0], theta[1], temp);
    const double k2 = arrhenius_standard(theta[2], theta[3], temp);
    const double r1 = k1 * c[0];
    const double r2 = k2 * c[1];
    double r3 = 0.0;
    if (include_parallel_path) {
      const double k3 = arrhenius_standard(theta[4], theta[5], temp);
      r3 = k3 * c[0];
    }
    Eigen::VectorXd dc(3);
    const double factor = kAreaCm2 / flow;  // cm^2 / (mL/min) with mL == cm^3
    dc[0] = factor * (-r1 - r3);
    dc[1] = factor * (r1 - r2);
    dc[2] = factor * (r2 + r3);
    return dc;
  };
  model.prepare_rhs = [include_parallel_path](const Eigen::VectorXd& u,
                                               const Eigen::VectorXd& theta) {
    const double temp = u[0];
    const double factor = kAreaCm2 / u[1];
    const double k1 = arrhenius_standard(theta[0], theta[1], temp);
    const double k2 = arrhenius_standard(theta[2], theta[3], temp);
    const double k3 = include_parallel_path
                          ? arrhenius_standard(theta[4], theta[5], temp)
                          : 0.0;
    return [factor, k1, k2, k3](const Eigen::VectorXd& c, Eigen::VectorXd& dc) {
      const double r1 = k1 * c[0];
      const double r2 = k2 * c[1];
      const double r3 = k3 * c[0];
      dc[0] = factor * (-r1 - r3);
      dc[1] = factor * (r1 - r2);
      dc[2] = factor * (r2 + r3);
    };
  };
  model.inlet = [](const Eigen::VectorXd&) {
    Eigen::VectorXd c0(3);
    c0 << 2.0, 0.0, 0.0;
    return c0;
  };
  model.span = [](const Eigen::VectorXd&) { return kLengthCm; };
  return model;
}

// SnAr network in residence time; u = [T, F1, F2, F3].
KineticModel case2_model(double volume_ml, double stock1, double stock2) {
  KineticModel model;
  model.name = "case2_snar";
  model.n_species = 5;
  model.n_params = 8;
  model.parametrization = Parametrization::CenteredArrhenius;
  model.species_names = {"c1", "c2", "c3", "c4", "c5"};
  model.parameter_names = {"k0_1", "Ea_1", "k0_2", "Ea_2",
                           "k0_3", "Ea_3", "k0_4", "Ea_4"};
  model.rhs = [](const Eigen::VectorXd& c, const Eigen::VectorXd& u,
                 const Eigen::VectorXd& theta) {
    const double temp = u[0];
    const double k1 = arrhenius_centered(theta[0], theta[1], temp);
    const double k2 = arrhenius_centered(theta[2], theta[3], temp);
    const double k3 = arrhenius_centered(theta[4], theta[5], temp);
    const double k4 = arrhenius_centered(theta[6], theta[7], temp);
    const double r1 = k1 * c[0] * c[1];
    const double r2 = k2 * c[0] * c[1];
    const double r3 = k3 * c[1] * c[2];
    const double r4 = k4 * c[1] * c[3];
    Eigen::VectorXd dc(5);
    dc[0] = -r1 - r2;
    dc[1] = -r1 - r2 - r3 - r4;
    dc[2] = r1 + r3;
    dc[3] = r2 - r4;
    dc[4] = r3 + r4;
    return dc;
  };
  model.prepare_rhs = [](const Eigen::VectorXd& u, const Eigen::VectorXd& theta) {
    const double temp = u[0];
    const double k1 = arrhenius_centered(theta[0], theta[1], temp);
    const double k2 = arrhenius_centered(theta[2], theta[3], temp);
    const double k3 = arrhenius_centered(theta[4], theta[5], temp);
    const double k4 = arrhenius_centered(theta[6], theta[7], temp);
    return [k1, k2, k3, k4](const Eigen::VectorXd& c, Eigen::VectorXd& dc) {
      const double r1 = k1 * c[0] * c[1];
      const double r2 = k2 * c[0] * c[1];
      const double r3 = k3 * c[1] * c[2];
      const double r4 = k4 * c[1] * c[3];
      dc[0] = -r1 - r2;
      dc[1] = -r1 - r2 - r3 - r4;
      dc[2] = r1 + r3;
      dc[3] = r2 - r4;
      dc[4] = r3 + r4;
    };
  };
  model.inlet = [stock1, stock2](const Eigen::VectorXd& u) {
    const double total = u[1] + u[2] + u[3];
    Eigen::VectorXd c0 = Eigen::VectorXd::Zero(5);
    c0[0] = stock1 * u[1] / total;
    c0[1] = stock2 * u[2] / total;
    return c0;
  };
  model.span = [volume_ml](const Eigen::VectorXd& u) {
    return volume_ml / (u[1] + u[2] + u[3]);  // residence time, min
  };
  return model;
}

}  // namespace

CaseStudy make_case1() {
  CaseStudy cs;
  cs.id = "case1";
  cs.bounds.lo.resize(2);
  cs.bounds.hi.resize(2);
  cs.bounds.lo << 60.0, 0.004;
  cs.bounds.hi << 100.0, 0.008;
  cs.bounds.names = {"T_C", "F_mL_min"};

  cs.plant.model = case1_model(true);
  cs.plant.true_theta.resize(6);
  cs.plant.true_theta << 8.0, 29.0, 5.0, 35.0, 3.0, 32.0;
  cs.plant.disturbance = DisturbanceKind::AdditiveAll;
  cs.plant.disturbance_value = 0.1;
  cs.plant.noise_std.resize(3);
  cs.plant.noise_std << 0.039, 0.14, 0.05;

  cs.approx_model = case1_model(false);

  cs.constraints.push_back({"g1", 2, 0.4, true, 0.1});
  cs.constraints.push_back({"g2", 2, 0.1, false, 0.1});

  cs.initial_designs.resize(5, 2);
  cs.initial_designs << 79.6, 0.0069,
                        97.6, 0.0055,
                        62.8, 0.0077,
                        88.0, 0.0048,
                        69.0, 0.0062;
  cs.surrogate_points = 200;

  cs.theta_lo.resize(4);
  cs.theta_hi.resize(4);
  cs.theta_lo << 1e-4, 1.0, 1e-4, 1.0;
  cs.theta_hi << 50.0, 80.0, 50.0, 80.0;
  return cs;
}

CaseStudy make_case2(double reactor_volume_ml, double stock1_molar, double stock2_molar) {
  CaseStudy cs;
  cs.id = "case2";
  cs.bounds.lo.resize(4);
  cs.bounds.hi.resize(4);
  cs.bounds.lo << 60.0, 0.3, 0.3, 0.3;
  cs.bounds.hi << 120.0, 3.0, 3.0, 3.0;
  cs.bounds.names = {"T_C", "F1_mL_min", "F2_mL_min", "F3_mL_min"};

  cs.plant.model = case2_model(reactor_volume_ml, stock1_molar, stock2_molar);
  cs.plant.true_theta.resize(8);
  cs.plant.true_theta << 5.0, 27.0, 0.35, 33.0, 0.5, 33.0, 1.5, 43.0;
  cs.plant.disturbance = DisturbanceKind::MultiplicativeOutput;
  cs.plant.disturbance_value = 1.10;
  cs.plant.disturbance_output = 0;
  cs.plant.noise_std = Eigen::VectorXd::Constant(5, 1e-3);

  cs.approx_model = cs.plant.model;

  cs.constraints.push_back({"g1", 0, 0.1, true, 0.1});

  cs.initial_designs.resize(5, 4);
  cs.initial_designs << 104.8, 1.0, 1.9, 2.1,
                        120.0, 2.5, 2.5, 1.9,
                         61.1, 3.0, 0.9, 2.7,
                        106.9, 2.4, 1.2, 1.3,
                         83.5, 1.7, 1.6, 1.1;
  cs.surrogate_points = 400;

  cs.theta_lo.resize(8);
  cs.theta_hi.resize(8);
  for (int j = 0; j < 4; ++j) {
    cs.theta_lo[2 * j] = 1e-4;
    cs.theta_hi[2 * j] = 50.0;
    cs.theta_lo[2 * j + 1] = 1.0;
    cs.theta_hi[2 * j + 1] = 80.0;
  }
  cs.reactor_volume_ml = reactor_volume_ml;
  cs.stock1_molar = stock1_molar;
  cs.stock2_molar = stock2_molar;
  return cs;
}

}  // namespace safedoe::kinetics
