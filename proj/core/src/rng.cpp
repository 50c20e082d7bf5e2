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

#include "safedoe/rng.hpp"

#include <cmath>
#include <numbers>

#include "safedoe/errors.hpp"

namespace safedoe::rng {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Stream::Stream(std::uint64_t master_seed, std::string_view name, std::uint64_t index) {
  std::uint64_t s = splitmix64(master_seed ^ splitmix64(fnv1a64(name) + index));
  gen_.seed(s);
}

std::uint64_t Stream::next_u64() { return gen_(); }

double Stream::uniform() {
  // 53-bit mantissa, uniform in [0, 1).
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Stream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Stream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_normal_ = true;
  return radius * std::cos(angle);
}

Eigen::VectorXd Stream::normal_vector(Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
  return v;
}

std::uint64_t Stream::below(std::uint64_t n) {
  // Rejection sampling to avoid modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = gen_();
  while (x >= limit) x = gen_();
  return x % n;
}

Eigen::MatrixXd latin_hypercube(int n_samples, const Eigen::VectorXd& lo,
                                const Eigen::VectorXd& hi, Stream& stream) {
  if (lo.size() != hi.size())
    throw Error(ErrorCode::DimensionMismatch, "latin_hypercube: bound sizes differ");
  if (n_samples < 1)
    throw Error(ErrorCode::InvalidArgument, "latin_hypercube: n_samples must be >= 1");
  const Eigen::Index d = lo.size();
  Eigen::MatrixXd points(n_samples, d);
  std::vector<int> strata(static_cast<std::size_t>(n_samples));
  for (Eigen::Index j = 0; j < d; ++j) {
    for (int i = 0; i < n_samples; ++i) strata[static_cast<std::size_t>(i)] = i;
    // Fisher-Yates with the stream so the design is seed-reproducible.
    for (int i = n_samples - 1; i > 0; --i) {
      const auto k = static_cast<int>(stream.below(static_cast<std::uint64_t>(i) + 1));
      std::swap(strata[static_cast<std::size_t>(i)], strata[static_cast<std::size_t>(k)]);
    }
    for (int i = 0; i < n_samples; ++i) {
      const double cell = (static_cast<double>(strata[static_cast<std::size_t>(i)]) +
                           stream.uniform()) /
                          static_cast<double>(n_samples);
      points(i, j) = lo[j] + (hi[j] - lo[j]) * cell;
    }
  }
  return points;
}

}  // namespace safedoe::rng
