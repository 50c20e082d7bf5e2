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

#include <benchmark/benchmark.h>

#include "safedoe/design_objective.hpp"
#include "safedoe/estimation.hpp"
#include "safedoe/kinetics.hpp"

namespace {

using namespace safedoe;

struct Setup {
  kinetics::CaseStudy cs = kinetics::make_case1();
  estimation::PosteriorGaussian posterior;
  design::FimSpec spec;

  Setup() {
    posterior.mean.resize(4);
    posterior.mean << 6.5, 28.0, 0.05, 15.0;
    posterior.covariance = Eigen::MatrixXd::Identity(4, 4);
    posterior.covariance.diagonal() << 0.25, 1.0, 1e-4, 1.0;
    spec = design::FimSpec::from_noise(cs.plant.noise_std, 4);
  }
};

void BM_SurrogateTrain(benchmark::State& state) {
  Setup setup;
  design::SurrogateConfig cfg;
  cfg.n_points = static_cast<int>(state.range(0));
  cfg.gp_multistarts = 10;
  for (auto _ : state) {
    auto surrogate = design::ObjectiveSurrogate::train(
        setup.cs.approx_model, setup.cs.bounds, setup.posterior, setup.cs.theta_lo,
        setup.cs.theta_hi, setup.spec, cfg);
    benchmark::DoNotOptimize(surrogate);
  }
}
BENCHMARK(BM_SurrogateTrain)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Propagate(benchmark::State& state) {
  Setup setup;
  design::SurrogateConfig cfg;
  cfg.n_points = 200;
  cfg.gp_multistarts = 2;
  const auto surrogate = design::ObjectiveSurrogate::train(
      setup.cs.approx_model, setup.cs.bounds, setup.posterior, setup.cs.theta_lo,
      setup.cs.theta_hi, setup.spec, cfg);
  const Eigen::VectorXd u = setup.cs.initial_designs.row(0).transpose();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        surrogate.propagate(u, setup.posterior.mean, setup.posterior.covariance));
}
BENCHMARK(BM_Propagate)->Unit(benchmark::kMicrosecond);

}  // namespace
