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

#include <doctest.h>

#include <cstdlib>
#include <string>

#include "safedoe/config.hpp"
#include "safedoe/errors.hpp"

using namespace safedoe;

namespace {

const char* kFullConfig = R"(# full-featured config
[plant]
case = "case1"
noise_std = [0.039, 0.14, 0.05]
disturbance = "additive"
disturbance_value = 0.1

[model]
integrator_steps = 200

[constraints]
epsilon = [0.1, 0.1]

[algorithm]
alpha_j = 0.5
eta1 = 1e-3

[campaign]
method = "mc"
max_iterations = 12
tol1 = 1e-3
seed = 9
initial_designs = [
  [79.6, 0.0069],
  [97.6, 0.0055],
  [62.8, 0.0077],
]
)";

}  // namespace

TEST_SUITE_BEGIN("config");

TEST_CASE("parse, serialize, and re-parse is the identity") {
  const config::Document doc = config::parse_string(kFullConfig);
  const std::string text = config::serialize(doc);
  const config::Document doc2 = config::parse_string(text);
  CHECK(doc == doc2);
  CHECK(config::serialize(doc2) == text);
}

TEST_CASE("the resolved document round-trips through the builder") {
  const campaign::CampaignConfig cfg =
      config::build_campaign_config(config::parse_string(kFullConfig));
  const config::Document resolved = config::resolved_document(cfg);
  const campaign::CampaignConfig rebuilt = config::build_campaign_config(resolved);
  CHECK(config::resolved_document(rebuilt) == resolved);
}

TEST_CASE("defaults carry the published algorithm parameters") {
  const campaign::CampaignConfig cfg =
      config::build_campaign_config(config::parse_string("[plant]\ncase = \"case1\"\n"));
  CHECK(cfg.algo.alpha_j == 0.5);
  CHECK(cfg.algo.eta1 == 1e-3);
  CHECK(cfg.algo.eta2 == 1e-2);
  CHECK(cfg.algo.t1 == 2.0);
  CHECK(cfg.algo.t2 == 0.5);
  CHECK(cfg.algo.t3 == 0.5);
  CHECK(cfg.algo.initial_radius == 0.3);
  CHECK(cfg.algo.n_starts == 10);
  CHECK(cfg.algo.gp_multistarts == 10);
  CHECK(cfg.algo.mle_multistarts == 10);
  CHECK(cfg.algo.mc_samples == 1000);
  CHECK(cfg.tol1 == 1e-3);
  CHECK(cfg.max_iterations == 20);
  CHECK(cfg.case_study.surrogate_points == 200);
  for (const auto& c : cfg.case_study.constraints) CHECK(c.epsilon == 0.1);

  const campaign::CampaignConfig cfg2 =
      config::build_campaign_config(config::parse_string("[plant]\ncase = \"case2\"\n"));
  CHECK(cfg2.case_study.surrogate_points == 400);
  CHECK(cfg2.case_study.bounds.lo[0] == 60.0);
  CHECK(cfg2.case_study.bounds.hi[0] == 120.0);
}

TEST_CASE("schema violations name the offending field") {
  const auto message_of = [](const std::string& text) {
    try {
      config::build_campaign_config(config::parse_string(text));
      return std::string("no error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ConfigSchema);
      return std::string(e.what());
    }
  };
  CHECK(message_of("[plant]\ncase = \"case1\"\n[algorithm]\nbogus = 1\n")
            .find("algorithm.bogus") != std::string::npos);
  CHECK(message_of("[plant]\ncase = \"case1\"\nnoise_std = [0.1]\n").find("plant.noise_std") !=
        std::string::npos);
  CHECK(message_of("[plant]\ncase = \"case1\"\n[campaign]\nmethod = 3\n")
            .find("campaign.method") != std::string::npos);
  CHECK(message_of("[plant]\ncase = \"case9\"\n").find("plant.case") != std::string::npos);
  CHECK(message_of("[plant]\ncase = \"case1\"\n[constraints]\nepsilon = [2.0, 0.1]\n")
            .find("constraints.epsilon") != std::string::npos);
  CHECK(message_of("[bogus_section]\nx = 1\n").find("bogus_section") != std::string::npos);
}

TEST_CASE("parse errors carry a line number") {
  try {
    config::parse_string("[plant]\ncase == \"x\"\n");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("environment overrides are applied and validated") {
  setenv("SAFEDOE_CAMPAIGN_SEED", "42", 1);
  setenv("SAFEDOE_ALGORITHM_ALPHA_J", "0.25", 1);
  config::Document doc = config::parse_string("[plant]\ncase = \"case1\"\n");
  config::apply_env_overrides(doc);
  unsetenv("SAFEDOE_CAMPAIGN_SEED");
  unsetenv("SAFEDOE_ALGORITHM_ALPHA_J");
  const campaign::CampaignConfig cfg = config::build_campaign_config(doc);
  CHECK(cfg.seed == 42);
  CHECK(cfg.algo.alpha_j == 0.25);
}

TEST_CASE("the mismatch-free diagnostic plant is expressible") {
  const char* text = R"(
[plant]
case = "case1"
model = "approx"
true_params = [8.0, 29.0, 5.0, 35.0]
noise_std = [0.0, 0.0, 0.0]
)";
  const campaign::CampaignConfig cfg =
      config::build_campaign_config(config::parse_string(text));
  CHECK(cfg.case_study.mismatch_free);
  CHECK(cfg.case_study.plant.model.n_params == 4);
  CHECK(cfg.case_study.plant.disturbance == kinetics::DisturbanceKind::None);
}

TEST_SUITE_END();
