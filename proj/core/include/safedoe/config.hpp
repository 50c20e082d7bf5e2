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

#ifndef SAFEDOE_CONFIG_HPP
#define SAFEDOE_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include "safedoe/campaign.hpp"

namespace safedoe::config {

/// TOML-style scalar or (possibly nested) array.
struct Value {
  enum class Kind { Number, Boolean, String, Array };
  Kind kind = Kind::Number;
  double number = 0.0;
  bool boolean = false;
  std::string text;
  std::vector<Value> array;

  static Value of(double v);
  static Value of(bool v);
  static Value of(std::string v);
  static Value of(std::vector<Value> v);

  bool operator==(const Value& other) const;

  double as_number(const std::string& path) const;
  int as_int(const std::string& path) const;
  bool as_bool(const std::string& path) const;
  const std::string& as_string(const std::string& path) const;
  std::vector<double> as_number_array(const std::string& path) const;
  std::vector<std::vector<double>> as_matrix(const std::string& path) const;
};

using Table = std::map<std::string, Value>;
using Document = std::map<std::string, Table>;

/// Parses the supported TOML subset: [section] headers, key = value lines,
/// numbers, booleans, quoted strings, and (nested, multi-line) arrays.
/// Comments start with '#'. Throws Error(ConfigSchema) with a line number.
Document parse_string(const std::string& text);
Document parse_file(const std::string& path);

/// Canonical serialization; parse(serialize(doc)) == doc.
std::string serialize(const Document& doc);

/// Applies SAFEDOE_<SECTION>_<KEY>=<toml value> environment overrides.
void apply_env_overrides(Document& doc);

/// Validates the document against the schema and builds the campaign
/// configuration. Unknown sections/keys and type or size errors throw
/// Error(ConfigSchema) naming the offending field path.
campaign::CampaignConfig build_campaign_config(const Document& doc);

/// The fully resolved document for a built configuration (all defaults
/// materialized); used by --dry-run and the round-trip check.
Document resolved_document(const campaign::CampaignConfig& config);

}  // namespace safedoe::config

#endif  // SAFEDOE_CONFIG_HPP
