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

#ifndef SAFEDOE_RNG_HPP
#define SAFEDOE_RNG_HPP

#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <string_view>

namespace safedoe::rng {

/// Named, replayable random substream. All randomness in a campaign flows
/// from one master seed through streams keyed by (name, index), so a run can
/// be reproduced exactly and different components never share draws.
///
/// The normal generator is a hand-rolled Box-Muller so the byte stream does
/// not depend on the standard library's distribution implementation.
class Stream {
 public:
  Stream(std::uint64_t master_seed, std::string_view name, std::uint64_t index = 0);

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  /// Standard normal via Box-Muller; draws are paired internally.
  double normal();
  Eigen::VectorXd normal_vector(Eigen::Index n);
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 gen_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// FNV-1a hash used for stream naming and artifact checksums.
std::uint64_t fnv1a64(std::string_view bytes);

/// Latin hypercube sample: n points inside [lo, hi]^d, one point per stratum
/// and dimension, strata shuffled independently per dimension.
Eigen::MatrixXd latin_hypercube(int n_samples, const Eigen::VectorXd& lo,
                                const Eigen::VectorXd& hi, Stream& stream);

}  // namespace safedoe::rng

#endif  // SAFEDOE_RNG_HPP
