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

#ifndef SAFEDOE_STATS_HPP
#define SAFEDOE_STATS_HPP

namespace safedoe::stats {

/// p-quantile of the chi-square distribution with `dof` degrees of freedom.
double chi_squared_quantile(double p, double dof);

/// p-quantile of Student's t distribution with `dof` degrees of freedom.
double student_t_quantile(double p, double dof);

/// p-quantile of the standard normal distribution.
double normal_quantile(double p);

}  // namespace safedoe::stats

#endif  // SAFEDOE_STATS_HPP
