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

#include "safedoe/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "safedoe/errors.hpp"

namespace safedoe::stats {

namespace {

void check_p(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw Error(ErrorCode::InvalidArgument, "quantile probability must be in (0, 1)");
}

}  // namespace

double chi_squared_quantile(double p, double dof) {
  check_p(p);
  if (!(dof > 0.0))
    throw Error(ErrorCode::InvalidArgument, "chi-square dof must be positive");
  return boost::math::quantile(boost::math::chi_squared(dof), p);
}

double student_t_quantile(double p, double dof) {
  check_p(p);
  if (!(dof > 0.0))
    throw Error(ErrorCode::InvalidArgument, "student-t dof must be positive");
  return boost::math::quantile(boost::math::students_t(dof), p);
}

double normal_quantile(double p) {
  check_p(p);
  return boost::math::quantile(boost::math::normal(), p);
}

}  // namespace safedoe::stats
