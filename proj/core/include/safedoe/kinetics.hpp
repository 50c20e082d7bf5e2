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

#ifndef SAFEDOE_KINETICS_HPP
#define SAFEDOE_KINETICS_HPP

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace safedoe::kinetics {

/// Box bounds for the experiment decision variables.
struct DesignBounds {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  std::vector<std::string> names;

  Eigen::Index dim() const { return lo.size(); }
  bool contains(const Eigen::VectorXd& u, double tol = 0.0) const;
  /// Map to [-1, 1]^d; trust regions and termination work in these units.
  Eigen::VectorXd normalize(const Eigen::VectorXd& u) const;
  Eigen::VectorXd denormalize(const Eigen::VectorXd& z) const;
};

enum class Parametrization {
  /// k(T) = k0 * exp(-Ea / (R (T + 273.15))), Ea in kJ/mol.
  StandardArrhenius,
  /// k(T) = kref * exp(-(Ea/R) (1/(T+273.15) - 1/(90+273.15))); kref is the
  /// rate constant at the 90 C reference temperature.
  CenteredArrhenius,
};

double arrhenius_standard(double k0, double ea_kj_mol, double t_celsius);
double arrhenius_centered(double k_ref, double ea_kj_mol, double t_celsius);
double arrhenius(Parametrization p, double k0, double ea_kj_mol, double t_celsius);

/// A kinetic reactor model integrated along one independent variable
/// (axial position for the plug-flow case, residence time for the
/// stirred-flow case). Outputs are the full outlet state.
struct KineticModel {
  std::string name;
  int n_species = 0;
  int n_params = 0;  // theta = [k0_1, Ea_1, k0_2, Ea_2, ...]
  Parametrization parametrization = Parametrization::StandardArrhenius;
  std::vector<std::string> species_names;
  std::vector<std::string> parameter_names;

  /// State derivative d c / d var at (c, u, theta).
  std::function<Eigen::VectorXd(const Eigen::VectorXd& c, const Eigen::VectorXd& u,
                                const Eigen::VectorXd& theta)>
      rhs;
  /// Optional fast path: bind (u, theta) once per trajectory so rate
  /// constants are not re-derived at every step, writing the derivative into
  /// a caller-owned buffer. Falls back to rhs.
  using BoundRhs = std::function<void(const Eigen::VectorXd& c, Eigen::VectorXd& dc)>;
  std::function<BoundRhs(const Eigen::VectorXd& u, const Eigen::VectorXd& theta)>
      prepare_rhs;
  /// Inlet state as a function of the design point.
  std::function<Eigen::VectorXd(const Eigen::VectorXd& u)> inlet;
  /// Integration span (reactor length or exit residence time).
  std::function<double(const Eigen::VectorXd& u)> span;

  BoundRhs bind(const Eigen::VectorXd& u, const Eigen::VectorXd& theta) const {
    if (prepare_rhs) return prepare_rhs(u, theta);
    return [this, u, theta](const Eigen::VectorXd& c, Eigen::VectorXd& dc) {
      dc = rhs(c, u, theta);
    };
  }
};

/// Fixed-step classical RK4 outlet state; deterministic for identical inputs.
Eigen::VectorXd integrate(const KineticModel& model, const Eigen::VectorXd& u,
                          const Eigen::VectorXd& theta, int n_steps = 200);

/// Adaptive Runge-Kutta-Fehlberg 4(5) reference integration. Reserved for
/// oracles and accuracy checks, not the campaign path.
Eigen::VectorXd integrate_adaptive(const KineticModel& model, const Eigen::VectorXd& u,
                                   const Eigen::VectorXd& theta, double rel_tol = 1e-10);

/// Jacobian of the outlet state with respect to theta, by forward finite
/// differences with relative step 1e-6.
Eigen::MatrixXd sensitivities(const KineticModel& model, const Eigen::VectorXd& u,
                              const Eigen::VectorXd& theta, int n_steps = 200);

/// Scalar feasibility observable g(outputs) <= 0.
struct ConstraintDef {
  std::string name;
  int output_index = 0;
  double limit = 0.0;
  bool upper = true;       // true: c - limit <= 0, false: limit - c <= 0
  double epsilon = 0.1;    // admissible violation probability

  double value(const Eigen::VectorXd& outputs) const {
    const double c = outputs[output_index];
    return upper ? c - limit : limit - c;
  }
};

enum class DisturbanceKind {
  None,
  AdditiveAll,           // constant added to every measured concentration
  MultiplicativeOutput,  // one measured output scaled by a constant factor
};

/// The in-silico true system: true model and parameters plus the
/// measurement-corruption model (disturbance and Gaussian noise).
struct PlantSpec {
  KineticModel model;
  Eigen::VectorXd true_theta;
  DisturbanceKind disturbance = DisturbanceKind::None;
  double disturbance_value = 0.0;
  int disturbance_output = 0;  // for MultiplicativeOutput
  Eigen::VectorXd noise_std;   // one entry per measured output
  int integrator_steps = 200;

  void validate() const;
};

struct Measurement {
  Eigen::VectorXd u;
  Eigen::VectorXd y;  // disturbed + noisy outlet concentrations
  Eigen::VectorXd g;  // constraint observations computed from y
  int index = 0;      // timestamp index in the campaign
};

/// Runs one experiment: integrates the true model, applies the disturbance,
/// adds measurement noise drawn from the (master_seed, "plant-noise", index)
/// stream, and evaluates the constraint observables on the noisy outputs.
/// The same (seed, index) always yields the same measurement.
Measurement run_experiment(const PlantSpec& plant,
                           const std::vector<ConstraintDef>& constraints,
                           const Eigen::VectorXd& u, int index,
                           std::uint64_t master_seed);

/// Everything that defines one case study.
struct CaseStudy {
  std::string id;  // "case1", "case2", ...
  DesignBounds bounds;
  PlantSpec plant;
  KineticModel approx_model;  // the model being identified
  std::vector<ConstraintDef> constraints;
  Eigen::MatrixXd initial_designs;  // rows are preliminary design points
  int surrogate_points = 200;
  Eigen::VectorXd theta_lo, theta_hi;  // estimation bounds
  bool mismatch_free = false;          // plant uses the identified structure
  // case2 construction inputs, kept for config echo
  double reactor_volume_ml = 0.0;
  double stock1_molar = 0.0;
  double stock2_molar = 0.0;
};

/// First case study: plug-flow reactor, series mechanism with a neglected
/// parallel path in the identified model, constant additive disturbance.
CaseStudy make_case1();

/// Second case study: SnAr flow reactor, four bilinear reactions, correct
/// model structure but a multiplicative measurement bias on species 1.
/// True parameters and inlet stocks are configurable defaults.
CaseStudy make_case2(double reactor_volume_ml = 2.0, double stock1_molar = 1.0,
                     double stock2_molar = 2.0);

}  // namespace safedoe::kinetics

#endif  // SAFEDOE_KINETICS_HPP
