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

#include "safedoe/gp.hpp"
#include "safedoe/rng.hpp"

namespace {

using namespace safedoe;

struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};

Dataset make_dataset(int n, int d) {
  rng::Stream stream(1, "bench-gp");
  Dataset data;
  data.X.resize(n, d);
  data.y.resize(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) {
      data.X(i, j) = stream.uniform(-1.0, 1.0);
      s += std::sin(2.0 * data.X(i, j));
    }
    data.y[i] = s + 0.01 * stream.normal();
  }
  return data;
}

void BM_GpFit(benchmark::State& state) {
  const auto data = make_dataset(static_cast<int>(state.range(0)),
                                 static_cast<int>(state.range(1)));
  gp::HyperFitConfig cfg;
  cfg.n_multistarts = 10;
  cfg.max_iterations = 40;
  for (auto _ : state) {
    auto model =
        gp::GpModel::fit(data.X, data.y, gp::KernelFamily::Matern52, {}, cfg);
    benchmark::DoNotOptimize(model);
  }
}
BENCHMARK(BM_GpFit)->Args({200, 6})->Args({400, 12})->Unit(benchmark::kMillisecond);

void BM_GpPredict(benchmark::State& state) {
  const auto data = make_dataset(static_cast<int>(state.range(0)),
                                 static_cast<int>(state.range(1)));
  gp::HyperFitConfig cfg;
  cfg.n_multistarts = 2;
  const auto model = gp::GpModel::fit(data.X, data.y, gp::KernelFamily::Matern52, {}, cfg);
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.predict(x));
    benchmark::DoNotOptimize(model.var_grad(x));
  }
}
BENCHMARK(BM_GpPredict)->Args({200, 6})->Args({400, 12})->Unit(benchmark::kMicrosecond);

}  // namespace
