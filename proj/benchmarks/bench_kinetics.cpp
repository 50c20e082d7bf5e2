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

#include "safedoe/kinetics.hpp"

namespace {

using namespace safedoe;

void BM_IntegrateCase1(benchmark::State& state) {
  const kinetics::CaseStudy cs = kinetics::make_case1();
  const Eigen::VectorXd u = cs.initial_designs.row(0).transpose();
  for (auto _ : state)
    benchmark::DoNotOptimize(kinetics::integrate(cs.plant.model, u, cs.plant.true_theta));
}
BENCHMARK(BM_IntegrateCase1)->Unit(benchmark::kMicrosecond);

void BM_SensitivitiesCase1(benchmark::State& state) {
  const kinetics::CaseStudy cs = kinetics::make_case1();
  const Eigen::VectorXd u = cs.initial_designs.row(0).transpose();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        kinetics::sensitivities(cs.plant.model, u, cs.plant.true_theta));
}
BENCHMARK(BM_SensitivitiesCase1)->Unit(benchmark::kMicrosecond);

void BM_IntegrateCase2(benchmark::State& state) {
  const kinetics::CaseStudy cs = kinetics::make_case2();
  const Eigen::VectorXd u = cs.initial_designs.row(0).transpose();
  for (auto _ : state)
    benchmark::DoNotOptimize(kinetics::integrate(cs.plant.model, u, cs.plant.true_theta));
}
BENCHMARK(BM_IntegrateCase2)->Unit(benchmark::kMicrosecond);

}  // namespace
