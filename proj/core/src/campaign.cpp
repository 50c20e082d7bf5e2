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

#include "safedoe/campaign.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>

#include "safedoe/design_objective.hpp"
#include "safedoe/errors.hpp"
#include "safedoe/rng.hpp"
#include "safedoe/safe_opt.hpp"

namespace safedoe::campaign {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Model-predicted constraint values g_hat_i(u) at a fixed theta, with the
// outlet state cached across constraints and repeated calls at the same u.
class ConstraintPredictor {
 public:
  ConstraintPredictor(const kinetics::KineticModel& model,
                      const std::vector<kinetics::ConstraintDef>& constraints,
                      int integrator_steps)
      : model_(model), constraints_(constraints), steps_(integrator_steps) {}

  void set_theta(const Eigen::VectorXd& theta) {
    theta_ = theta;
    has_cache_ = false;
  }

  double g_hat(std::size_t i, const Eigen::VectorXd& u) const {
    if (!has_cache_ || u != cached_u_) {
      cached_outputs_ = kinetics::integrate(model_, u, theta_, steps_);
      cached_u_ = u;
      has_cache_ = true;
    }
    return constraints_[i].value(cached_outputs_);
  }

 private:
  const kinetics::KineticModel& model_;
  const std::vector<kinetics::ConstraintDef>& constraints_;
  int steps_;
  Eigen::VectorXd theta_;
  mutable Eigen::VectorXd cached_u_;
  mutable Eigen::VectorXd cached_outputs_;
  mutable bool has_cache_ = false;
};

double log_det_psd(const Eigen::MatrixXd& m) {
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    log_det += std::log(std::max(ldlt.vectorD()[i], 1e-300));
  return log_det;
}

// Posterior sampler: mu + E sqrt(max(lambda, 0)) z.
struct PosteriorSampler {
  Eigen::VectorXd mean;
  Eigen::MatrixXd transform;

  explicit PosteriorSampler(const estimation::PosteriorGaussian& posterior) {
    mean = posterior.mean;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(posterior.covariance);
    Eigen::VectorXd roots = eigen.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    transform = eigen.eigenvectors() * roots.asDiagonal();
  }

  Eigen::VectorXd draw(rng::Stream& stream) const {
    return mean + transform * stream.normal_vector(mean.size());
  }
};

// When no start satisfies the constraints, the campaign performs the most
// nearly feasible experiment instead of re-running the incumbent: it still
// gathers the data the models need to open up a feasible region.
Eigen::VectorXd least_violating_point(
    const std::vector<std::function<double(const Eigen::VectorXd&)>>& constraints,
    const safeopt::Ball& ball, const safeopt::SolveOptions& options) {
  auto worst = [&constraints](const Eigen::VectorXd& u) {
    double value = -std::numeric_limits<double>::infinity();
    for (const auto& c : constraints) value = std::max(value, c(u));
    return value;
  };
  safeopt::SolveOptions fallback = options;
  fallback.penalty_rounds = 1;
  return safeopt::solve_penalized(worst, {}, ball, fallback).u;
}

}  // namespace

double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty())
    throw Error(ErrorCode::InvalidArgument, "empirical_quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

const char* method_name(Method m) {
  switch (m) {
    case Method::Gp: return "gp";
    case Method::Mc: return "mc";
    case Method::De: return "de";
  }
  return "unknown";
}

Method method_from_name(const std::string& name) {
  if (name == "gp") return Method::Gp;
  if (name == "mc") return Method::Mc;
  if (name == "de") return Method::De;
  throw Error(ErrorCode::InvalidArgument, "unknown method: " + name);
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::None: return "none";
    case Termination::DesignChange: return "design_change";
    case Termination::Statistics: return "statistics";
    case Termination::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

void AlgorithmParams::validate() const {
  const double positives[] = {alpha_j, eta1,  eta2, t1,
                              t2,      t3,    initial_radius};
  for (double v : positives)
    if (!(v > 0.0))
      throw Error(ErrorCode::InvalidArgument, "algorithm parameters must be positive");
  if (!(t2 < 1.0 && 1.0 < t1 && t3 < 1.0))
    throw Error(ErrorCode::InvalidArgument, "need t2 < 1 < t1 and t3 < 1");
  if (n_starts < 1 || gp_multistarts < 1 || gp_refit_multistarts < 1 ||
      mle_multistarts < 1 || mc_samples < 1)
    throw Error(ErrorCode::InvalidArgument, "multistart/sample counts must be >= 1");
}

int CampaignState::violation_count(int constraint_index) const {
  int count = 0;
  for (std::size_t i = static_cast<std::size_t>(n_preliminary); i < experiments.size(); ++i)
    if (experiments[i].g[constraint_index] > 0.0) ++count;
  return count;
}

TerminationDecision check_termination(const std::optional<Eigen::VectorXd>& prev_norm,
                                      const std::optional<Eigen::VectorXd>& last_norm,
                                      const estimation::FitReport& report, double tol1) {
  TerminationDecision decision;
  if (prev_norm && last_norm && (*last_norm - *prev_norm).norm() <= tol1) {
    decision.stop = true;
    decision.reason = Termination::DesignChange;
    return decision;
  }
  if (report.all_pass()) {
    decision.stop = true;
    decision.reason = Termination::Statistics;
  }
  return decision;
}

CampaignState run_campaign(const CampaignConfig& config) {
  config.algo.validate();
  const kinetics::CaseStudy& cs = config.case_study;
  cs.plant.validate();
  const Eigen::Index n_u = cs.bounds.dim();
  const int n_prelim = static_cast<int>(cs.initial_designs.rows());
  if (n_prelim < static_cast<int>(n_u) + 1)
    throw Error(ErrorCode::InvalidArgument,
                "campaign needs at least n_u + 1 preliminary experiments");
  const std::size_t n_constraints = cs.constraints.size();
  const Eigen::VectorXd& noise = cs.plant.noise_std;
  const int steps = config.integrator_steps;

  const Clock::time_point t_start = Clock::now();

  CampaignState state;
  state.case_id = cs.id;
  state.method = config.method;
  state.seed = config.seed;
  state.n_preliminary = n_prelim;
  for (int i = 0; i < n_prelim; ++i) {
    state.experiments.push_back(kinetics::run_experiment(
        cs.plant, cs.constraints, cs.initial_designs.row(i).transpose(), i, config.seed));
  }

  // Select u0: the safest preliminary condition (smallest worst-case
  // observed constraint) anchors the first trust region.
  std::size_t incumbent = 0;
  double incumbent_worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state.experiments.size(); ++i) {
    const double worst = state.experiments[i].g.size() > 0
                             ? state.experiments[i].g.maxCoeff()
                             : 0.0;
    if (worst < incumbent_worst) {
      incumbent_worst = worst;
      incumbent = i;
    }
  }

  ConstraintPredictor predictor(cs.approx_model, cs.constraints, steps);

  std::vector<safeopt::TrustRegion> regions(
      n_constraints, safeopt::TrustRegion{config.algo.initial_radius, config.algo.eta1,
                                          config.algo.eta2, config.algo.t1,
                                          config.algo.t2, config.algo.t3});

  Eigen::MatrixXd prior_information =
      Eigen::MatrixXd::Zero(cs.approx_model.n_params, cs.approx_model.n_params);
  bool prior_information_ready = false;
  const design::FimSpec unit_spec =
      design::FimSpec::from_noise(noise, cs.approx_model.n_params);

  std::optional<Eigen::VectorXd> warm_theta;
  std::optional<gp::KernelSpec> surrogate_warm;
  std::vector<std::optional<gp::KernelSpec>> mismatch_warm(n_constraints);
  std::optional<Eigen::VectorXd> chain_prev, chain_last;  // solver-design chain
  std::optional<std::vector<double>> last_design_pred;    // g_hat at last designed point

  try {
  for (int k = 1;; ++k) {
    const Clock::time_point iter_t0 = Clock::now();

    estimation::MleOptions mle_options;
    mle_options.n_multistarts = config.algo.mle_multistarts;
    mle_options.theta_lo = cs.theta_lo;
    mle_options.theta_hi = cs.theta_hi;
    mle_options.seed = config.seed;
    mle_options.warm_start = warm_theta;
    mle_options.max_iterations = config.algo.mle_max_iterations;
    const estimation::MleResult mle =
        estimation::mle_fit(state.experiments, cs.approx_model, noise, mle_options);
    warm_theta = mle.theta;

    const estimation::PosteriorGaussian posterior =
        estimation::laplace_posterior(mle.theta, state.experiments, cs.approx_model,
                                      noise, steps);
    const estimation::FitReport report = estimation::statistics(
        mle.theta, posterior, state.experiments, cs.approx_model, noise, config.alpha,
        steps);
    state.reports.push_back(report);
    state.theta_final = mle.theta;
    state.v_theta_diag_final = report.covariance_diagonal;

    const TerminationDecision decision =
        check_termination(chain_prev, chain_last, report, config.tol1);
    if (decision.stop) {
      state.termination = decision.reason;
      break;
    }
    if (k > config.max_iterations) {
      state.termination = Termination::MaxIterations;
      break;
    }

    predictor.set_theta(mle.theta);
    if (!prior_information_ready) {
      for (int i = 0; i < n_prelim; ++i)
        prior_information += design::fim(cs.approx_model,
                                         state.experiments[static_cast<std::size_t>(i)].u,
                                         mle.theta, unit_spec, steps);
      prior_information_ready = true;
    }

    IterationRecord rec;
    rec.iteration = k;
    rec.theta = mle.theta;
    rec.v_theta_diag = report.covariance_diagonal;
    rec.t_values = report.t_values;
    rec.t_ref = report.t_ref;
    rec.chi2_sample = report.chi2_sample;
    rec.chi2_ref = report.chi2_ref;
    rec.stats_pass = report.all_pass();

    const bool any_designed = state.designed_count() > 0;
    const Eigen::VectorXd u_curr_phys = any_designed
                                            ? state.experiments.back().u
                                            : state.experiments[incumbent].u;
    const Eigen::VectorXd u_curr_norm = cs.bounds.normalize(u_curr_phys);
    Eigen::VectorXd u_next_norm;

    // Uncertainty-propagated D-optimality objective, shared by all methods.
    design::FimSpec fim_spec = unit_spec;
    fim_spec.prior_information = prior_information;
    design::SurrogateConfig surrogate_cfg;
    surrogate_cfg.n_points = cs.surrogate_points;
    surrogate_cfg.family = gp::KernelFamily::Matern52;
    surrogate_cfg.gp_multistarts = surrogate_warm
                                       ? config.algo.gp_refit_multistarts
                                       : config.algo.gp_multistarts;
    surrogate_cfg.gp_max_iterations = config.algo.gp_max_iterations;
    surrogate_cfg.seed = config.seed + static_cast<std::uint64_t>(k) * 0x9e3779b9ULL;
    surrogate_cfg.warm_start = surrogate_warm;
    surrogate_cfg.integrator_steps = steps;

    safeopt::SolveOptions solve_options;
    solve_options.n_starts = config.algo.n_starts;
    solve_options.seed = config.seed + static_cast<std::uint64_t>(k);
    solve_options.max_iterations = config.algo.solver_max_iterations;

    const auto maybe_dump = [&](const design::ObjectiveSurrogate& surrogate) {
      if (!config.surrogate_dump_dir.empty())
        surrogate.dump_csv(config.surrogate_dump_dir + "/surrogate_iter" +
                           std::to_string(k) + ".csv");
    };

    switch (config.method) {
      case Method::Gp: {
        // Mismatch GPs with the parametric prediction as prior mean.
        std::vector<safeopt::ChanceConstraint> chance(n_constraints);
        for (std::size_t i = 0; i < n_constraints; ++i) {
          const Eigen::Index n_exp = static_cast<Eigen::Index>(state.experiments.size());
          Eigen::MatrixXd inputs(n_exp, n_u);
          Eigen::VectorXd targets(n_exp);
          for (Eigen::Index e = 0; e < n_exp; ++e) {
            inputs.row(e) =
                cs.bounds.normalize(state.experiments[static_cast<std::size_t>(e)].u)
                    .transpose();
            targets[e] =
                state.experiments[static_cast<std::size_t>(e)].g[static_cast<Eigen::Index>(i)];
          }
          gp::PriorMean prior = [&predictor, &cs, i](const Eigen::VectorXd& u_norm) {
            return predictor.g_hat(i, cs.bounds.denormalize(u_norm));
          };
          gp::HyperFitConfig hcfg;
          hcfg.n_multistarts = config.algo.gp_multistarts;
          hcfg.max_iterations = config.algo.gp_max_iterations;
          hcfg.seed = config.seed;
          hcfg.warm_start = mismatch_warm[i];
          auto model = std::make_shared<gp::GpModel>(gp::GpModel::fit(
              inputs, targets, gp::KernelFamily::SquaredExponential, prior, hcfg));
          mismatch_warm[i] = model->kernel();
          chance[i] = safeopt::ChanceConstraint{static_cast<int>(i), cs.constraints[i],
                                                cs.constraints[i].epsilon, model};
        }

        // Trust-region maintenance against the previous designed execution.
        bool any_violation = false;
        if (last_design_pred) {
          const Eigen::VectorXd& g_obs = state.experiments.back().g;
          for (std::size_t i = 0; i < n_constraints; ++i) {
            const double rho =
                safeopt::tr_rho(g_obs[static_cast<Eigen::Index>(i)], (*last_design_pred)[i]);
            regions[i] = safeopt::tr_update(regions[i], rho);
            rec.rho.push_back(rho);
          }
          for (std::size_t i = 0; i < n_constraints; ++i) {
            const bool violated = g_obs[static_cast<Eigen::Index>(i)] > 0.0;
            rec.violated_prev.push_back(violated);
            if (violated) {
              regions[i].radius *= regions[i].t3;
              any_violation = true;
            }
          }
        } else {
          rec.rho.assign(n_constraints, std::numeric_limits<double>::quiet_NaN());
          rec.violated_prev.assign(n_constraints, false);
        }
        for (const safeopt::TrustRegion& tr : regions) rec.radii.push_back(tr.radius);

        if (any_violation) {
          u_next_norm = u_curr_norm;  // backtrack: hold the design
          rec.design_held = true;
        } else {
          const design::ObjectiveSurrogate surrogate = design::ObjectiveSurrogate::train(
              cs.approx_model, cs.bounds, posterior, cs.theta_lo, cs.theta_hi, fim_spec,
              surrogate_cfg);
          surrogate_warm = surrogate.model().kernel();
          maybe_dump(surrogate);
          auto objective = [&](const Eigen::VectorXd& u_norm) {
            return surrogate.lower_confidence(cs.bounds.denormalize(u_norm),
                                              posterior.mean, posterior.covariance,
                                              config.algo.alpha_j);
          };
          const safeopt::SolveResult solved =
              safeopt::solve_design(objective, chance, regions, u_curr_norm, solve_options);
          u_next_norm = solved.u;
          rec.solver_feasible = solved.feasible;
          if (!solved.feasible) {
            double min_radius = std::numeric_limits<double>::infinity();
            for (const safeopt::TrustRegion& tr : regions)
              min_radius = std::min(min_radius, tr.radius);
            std::vector<std::function<double(const Eigen::VectorXd&)>> fns;
            for (const safeopt::ChanceConstraint& c : chance)
              fns.push_back([&c](const Eigen::VectorXd& u) { return c.tightened(u); });
            u_next_norm = least_violating_point(
                fns, safeopt::Ball{u_curr_norm, min_radius}, solve_options);
          }
        }

        for (std::size_t i = 0; i < n_constraints; ++i) {
          const gp::Prediction p = chance[i].mismatch_gp->predict(u_next_norm);
          rec.g_pred_mean.push_back(p.mean);
          rec.g_pred_sd.push_back(std::sqrt(std::max(p.variance, 0.0)));
          rec.tightened.push_back(chance[i].tightened(u_next_norm));
        }
        last_design_pred = rec.g_pred_mean;
        break;
      }
      case Method::Mc: {
        const design::ObjectiveSurrogate surrogate = design::ObjectiveSurrogate::train(
            cs.approx_model, cs.bounds, posterior, cs.theta_lo, cs.theta_hi, fim_spec,
            surrogate_cfg);
        surrogate_warm = surrogate.model().kernel();
        maybe_dump(surrogate);
        auto objective = [&](const Eigen::VectorXd& u_norm) {
          return surrogate.lower_confidence(cs.bounds.denormalize(u_norm), posterior.mean,
                                            posterior.covariance, config.algo.alpha_j);
        };

        // Posterior samples are drawn once per iteration and reused across
        // backoff passes (common random numbers keep the loop stable).
        PosteriorSampler sampler(posterior);
        rng::Stream mc_stream(config.seed, "mc-backoff", static_cast<std::uint64_t>(k));
        std::vector<Eigen::VectorXd> samples;
        samples.reserve(static_cast<std::size_t>(config.algo.mc_samples));
        for (int s = 0; s < config.algo.mc_samples; ++s) {
          // The Gaussian posterior is a local approximation; keep draws
          // inside the estimation box.
          samples.push_back(
              sampler.draw(mc_stream).cwiseMax(cs.theta_lo).cwiseMin(cs.theta_hi));
        }

        Eigen::VectorXd backoffs = Eigen::VectorXd::Zero(
            static_cast<Eigen::Index>(n_constraints));
        Eigen::VectorXd u_cand_norm = u_curr_norm;
        safeopt::SolveResult solved;
        solved.u = u_curr_norm;
        solved.feasible = true;
        for (int pass = 1; pass <= config.algo.backoff_max_passes; ++pass) {
          rec.backoff_passes = pass;
          const Eigen::VectorXd u_cand_phys = cs.bounds.denormalize(u_cand_norm);
          std::vector<std::vector<double>> sampled_g(n_constraints);
          for (auto& v : sampled_g) v.reserve(samples.size());
          for (const Eigen::VectorXd& sample : samples) {
            try {
              const Eigen::VectorXd outputs =
                  kinetics::integrate(cs.approx_model, u_cand_phys, sample, steps);
              for (std::size_t i = 0; i < n_constraints; ++i)
                sampled_g[i].push_back(cs.constraints[i].value(outputs));
            } catch (const Error&) {
              // Unsimulatable draw: drop it rather than poison the quantile.
            }
          }
          if (sampled_g[0].size() < samples.size() / 2)
            throw Error(ErrorCode::IntegrationFailure,
                        "mc backoff: most posterior draws were not simulatable");
          Eigen::VectorXd new_backoffs(static_cast<Eigen::Index>(n_constraints));
          for (std::size_t i = 0; i < n_constraints; ++i) {
            const double quantile =
                empirical_quantile(sampled_g[i], 1.0 - cs.constraints[i].epsilon);
            new_backoffs[static_cast<Eigen::Index>(i)] =
                quantile - predictor.g_hat(i, u_cand_phys);
          }
          const bool converged =
              pass > 1 &&
              (new_backoffs - backoffs).lpNorm<Eigen::Infinity>() < config.algo.backoff_tol;
          backoffs = new_backoffs;
          if (converged) break;

          std::vector<std::function<double(const Eigen::VectorXd&)>> fns;
          for (std::size_t i = 0; i < n_constraints; ++i) {
            const double b = backoffs[static_cast<Eigen::Index>(i)];
            fns.push_back([&predictor, &cs, i, b](const Eigen::VectorXd& u_norm) {
              return predictor.g_hat(i, cs.bounds.denormalize(u_norm)) + b;
            });
          }
          solved = safeopt::solve_penalized(
              objective, fns,
              safeopt::Ball{u_curr_norm, std::numeric_limits<double>::infinity()},
              solve_options);
          u_cand_norm = solved.u;
          if (!solved.feasible) break;
        }
        u_next_norm = u_cand_norm;
        rec.solver_feasible = solved.feasible;
        if (!solved.feasible) {
          std::vector<std::function<double(const Eigen::VectorXd&)>> fns;
          for (std::size_t i = 0; i < n_constraints; ++i) {
            const double b = backoffs[static_cast<Eigen::Index>(i)];
            fns.push_back([&predictor, &cs, i, b](const Eigen::VectorXd& u_norm) {
              return predictor.g_hat(i, cs.bounds.denormalize(u_norm)) + b;
            });
          }
          u_next_norm = least_violating_point(
              fns,
              safeopt::Ball{u_curr_norm, std::numeric_limits<double>::infinity()},
              solve_options);
        }
        for (Eigen::Index i = 0; i < backoffs.size(); ++i)
          rec.backoffs.push_back(backoffs[i]);
        const Eigen::VectorXd u_next_phys = cs.bounds.denormalize(u_next_norm);
        for (std::size_t i = 0; i < n_constraints; ++i) {
          rec.g_pred_mean.push_back(predictor.g_hat(i, u_next_phys));
          rec.g_pred_sd.push_back(0.0);
        }
        break;
      }
      case Method::De: {
        const design::ObjectiveSurrogate surrogate = design::ObjectiveSurrogate::train(
            cs.approx_model, cs.bounds, posterior, cs.theta_lo, cs.theta_hi, fim_spec,
            surrogate_cfg);
        surrogate_warm = surrogate.model().kernel();
        maybe_dump(surrogate);
        auto objective = [&](const Eigen::VectorXd& u_norm) {
          return surrogate.lower_confidence(cs.bounds.denormalize(u_norm), posterior.mean,
                                            posterior.covariance, config.algo.alpha_j);
        };

        // Constant disturbance from the latest executed experiment.
        const kinetics::Measurement& latest = state.experiments.back();
        Eigen::VectorXd disturbance(static_cast<Eigen::Index>(n_constraints));
        for (std::size_t i = 0; i < n_constraints; ++i)
          disturbance[static_cast<Eigen::Index>(i)] =
              latest.g[static_cast<Eigen::Index>(i)] - predictor.g_hat(i, latest.u);

        std::vector<std::function<double(const Eigen::VectorXd&)>> fns;
        for (std::size_t i = 0; i < n_constraints; ++i) {
          const double d = disturbance[static_cast<Eigen::Index>(i)];
          fns.push_back([&predictor, &cs, i, d](const Eigen::VectorXd& u_norm) {
            return predictor.g_hat(i, cs.bounds.denormalize(u_norm)) + d;
          });
        }
        const safeopt::SolveResult solved = safeopt::solve_penalized(
            objective, fns,
            safeopt::Ball{u_curr_norm, std::numeric_limits<double>::infinity()},
            solve_options);
        u_next_norm = solved.u;
        rec.solver_feasible = solved.feasible;
        if (!solved.feasible)
          u_next_norm = least_violating_point(
              fns,
              safeopt::Ball{u_curr_norm, std::numeric_limits<double>::infinity()},
              solve_options);
        for (Eigen::Index i = 0; i < disturbance.size(); ++i)
          rec.backoffs.push_back(disturbance[i]);
        const Eigen::VectorXd u_next_phys = cs.bounds.denormalize(u_next_norm);
        for (std::size_t i = 0; i < n_constraints; ++i) {
          rec.g_pred_mean.push_back(predictor.g_hat(i, u_next_phys));
          rec.g_pred_sd.push_back(0.0);
        }
        break;
      }
    }

    // Termination chain: only consecutive solver-produced designs compare.
    if (!rec.design_held && rec.solver_feasible) {
      chain_prev = chain_last;
      chain_last = u_next_norm;
    } else {
      chain_prev.reset();
      chain_last.reset();
    }

    const Eigen::VectorXd u_next_phys = cs.bounds.denormalize(u_next_norm);
    const kinetics::Measurement executed = kinetics::run_experiment(
        cs.plant, cs.constraints, u_next_phys,
        static_cast<int>(state.experiments.size()), config.seed);
    state.experiments.push_back(executed);

    prior_information +=
        design::fim(cs.approx_model, u_next_phys, mle.theta, unit_spec, steps);
    rec.logdet_m0 = log_det_psd(prior_information);
    rec.u_design = u_next_phys;
    rec.y_measured = executed.y;
    rec.g_measured = executed.g;
    state.iterations.push_back(std::move(rec));
    state.iteration_seconds.push_back(seconds_since(iter_t0));
  }
  } catch (const Error& e) {
    for (const safeopt::TrustRegion& tr : regions) state.final_radii.push_back(tr.radius);
    state.wall_seconds = seconds_since(t_start);
    throw CampaignAborted(e, std::move(state));
  }

  for (const safeopt::TrustRegion& tr : regions) state.final_radii.push_back(tr.radius);
  state.wall_seconds = seconds_since(t_start);
  return state;
}

CampaignState run_gp_mbdoe(const CampaignConfig& config) {
  CampaignConfig c = config;
  c.method = Method::Gp;
  return run_campaign(c);
}

CampaignState run_mc_mbdoe(const CampaignConfig& config) {
  CampaignConfig c = config;
  c.method = Method::Mc;
  return run_campaign(c);
}

CampaignState run_de_mbdoe(const CampaignConfig& config) {
  CampaignConfig c = config;
  c.method = Method::De;
  return run_campaign(c);
}

}  // namespace safedoe::campaign
