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

#include "safedoe/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "safedoe/errors.hpp"

extern char** environ;

namespace safedoe::config {

namespace {

[[noreturn]] void schema_error(const std::string& message) {
  throw Error(ErrorCode::ConfigSchema, message);
}

std::string format_number(double v) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return std::string(buffer, result.ptr);
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  Document parse() {
    Document doc;
    std::string section;
    while (!at_end()) {
      skip_whitespace_and_comments(true);
      if (at_end()) break;
      if (peek() == '[') {
        section = parse_section_header();
        doc[section];  // materialize even if empty
        continue;
      }
      const std::string key = parse_bare_key();
      skip_whitespace_and_comments(false);
      expect('=');
      skip_whitespace_and_comments(false);
      Value value = parse_value();
      if (section.empty())
        fail("key '" + key + "' appears before any [section] header");
      if (!doc[section].emplace(key, std::move(value)).second)
        fail("duplicate key '" + section + "." + key + "'");
      expect_end_of_line();
    }
    return doc;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  char advance() {
    const char c = text_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  [[noreturn]] void fail(const std::string& message) const {
    schema_error("config line " + std::to_string(line_) + ": " + message);
  }

  void skip_whitespace_and_comments(bool include_newlines) {
    while (!at_end()) {
      const char c = peek();
      if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' ||
                 (include_newlines && c == '\n')) {
        advance();
      } else {
        break;
      }
    }
  }

  void expect(char c) {
    if (at_end() || peek() != c) fail(std::string("expected '") + c + "'");
    advance();
  }

  void expect_end_of_line() {
    skip_whitespace_and_comments(false);
    if (at_end()) return;
    if (peek() != '\n') fail("unexpected trailing content");
    advance();
  }

  std::string parse_section_header() {
    expect('[');
    std::string name;
    while (!at_end() && peek() != ']') name += advance();
    expect(']');
    expect_end_of_line();
    if (name.empty()) fail("empty section name");
    return name;
  }

  std::string parse_bare_key() {
    std::string key;
    while (!at_end()) {
      const char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
        key += advance();
      } else {
        break;
      }
    }
    if (key.empty()) fail("expected a key");
    return key;
  }

  Value parse_value() {
    skip_whitespace_and_comments(true);
    if (at_end()) fail("expected a value");
    const char c = peek();
    if (c == '[') return parse_array();
    if (c == '"') return parse_string_literal();
    return parse_scalar();
  }

  Value parse_array() {
    expect('[');
    std::vector<Value> items;
    skip_whitespace_and_comments(true);
    while (!at_end() && peek() != ']') {
      items.push_back(parse_value());
      skip_whitespace_and_comments(true);
      if (!at_end() && peek() == ',') {
        advance();
        skip_whitespace_and_comments(true);
      }
    }
    expect(']');
    return Value::of(std::move(items));
  }

  Value parse_string_literal() {
    expect('"');
    std::string out;
    while (!at_end() && peek() != '"') {
      char c = advance();
      if (c == '\\' && !at_end()) {
        const char esc = advance();
        c = esc == 'n' ? '\n' : esc == 't' ? '\t' : esc;
      }
      out += c;
    }
    expect('"');
    return Value::of(std::move(out));
  }

  Value parse_scalar() {
    std::string token;
    while (!at_end()) {
      const char c = peek();
      if (c == '\n' || c == ',' || c == ']' || c == '#' || c == ' ' || c == '\t' ||
          c == '\r')
        break;
      token += advance();
    }
    if (token == "true") return Value::of(true);
    if (token == "false") return Value::of(false);
    try {
      std::size_t consumed = 0;
      const double v = std::stod(token, &consumed);
      if (consumed == token.size()) return Value::of(v);
    } catch (const std::exception&) {
    }
    fail("cannot parse value '" + token + "'");
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

void serialize_value(std::ostringstream& out, const Value& v) {
  switch (v.kind) {
    case Value::Kind::Number:
      out << format_number(v.number);
      break;
    case Value::Kind::Boolean:
      out << (v.boolean ? "true" : "false");
      break;
    case Value::Kind::String:
      out << '"';
      for (char c : v.text) {
        if (c == '"' || c == '\\') out << '\\';
        out << c;
      }
      out << '"';
      break;
    case Value::Kind::Array:
      out << '[';
      for (std::size_t i = 0; i < v.array.size(); ++i) {
        if (i) out << ", ";
        serialize_value(out, v.array[i]);
      }
      out << ']';
      break;
  }
}

}  // namespace

Value Value::of(double v) {
  Value out;
  out.kind = Kind::Number;
  out.number = v;
  return out;
}

Value Value::of(bool v) {
  Value out;
  out.kind = Kind::Boolean;
  out.boolean = v;
  return out;
}

Value Value::of(std::string v) {
  Value out;
  out.kind = Kind::String;
  out.text = std::move(v);
  return out;
}

Value Value::of(std::vector<Value> v) {
  Value out;
  out.kind = Kind::Array;
  out.array = std::move(v);
  return out;
}

bool Value::operator==(const Value& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case Kind::Number: return number == other.number;
    case Kind::Boolean: return boolean == other.boolean;
    case Kind::String: return text == other.text;
    case Kind::Array: return array == other.array;
  }
  return false;
}

double Value::as_number(const std::string& path) const {
  if (kind != Kind::Number) schema_error(path + ": expected a number");
  return number;
}

int Value::as_int(const std::string& path) const {
  const double v = as_number(path);
  if (std::floor(v) != v) schema_error(path + ": expected an integer");
  return static_cast<int>(v);
}

bool Value::as_bool(const std::string& path) const {
  if (kind != Kind::Boolean) schema_error(path + ": expected a boolean");
  return boolean;
}

const std::string& Value::as_string(const std::string& path) const {
  if (kind != Kind::String) schema_error(path + ": expected a string");
  return text;
}

std::vector<double> Value::as_number_array(const std::string& path) const {
  if (kind != Kind::Array) schema_error(path + ": expected an array");
  std::vector<double> out;
  out.reserve(array.size());
  for (std::size_t i = 0; i < array.size(); ++i)
    out.push_back(array[i].as_number(path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::vector<double>> Value::as_matrix(const std::string& path) const {
  if (kind != Kind::Array) schema_error(path + ": expected an array of arrays");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < array.size(); ++i)
    out.push_back(array[i].as_number_array(path + "[" + std::to_string(i) + "]"));
  return out;
}

Document parse_string(const std::string& text) { return Parser(text).parse(); }

Document parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str());
}

std::string serialize(const Document& doc) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [section, table] : doc) {
    if (!first) out << "\n";
    first = false;
    out << "[" << section << "]\n";
    for (const auto& [key, value] : table) {
      out << key << " = ";
      serialize_value(out, value);
      out << "\n";
    }
  }
  return out.str();
}

void apply_env_overrides(Document& doc) {
  static const char* kSections[] = {"plant", "model", "constraints", "algorithm",
                                    "campaign"};
  for (const char* section : kSections) {
    std::string prefix = "SAFEDOE_";
    for (const char* p = section; *p; ++p)
      prefix += static_cast<char>(std::toupper(static_cast<unsigned char>(*p)));
    prefix += '_';
    // Keys are resolved lazily in build_campaign_config; here we only stash
    // raw overrides, so any SAFEDOE_<SECTION>_<KEY> is accepted and later
    // validated against the schema.
    for (char** env = environ; *env != nullptr; ++env) {
      const std::string entry(*env);
      if (entry.rfind(prefix, 0) != 0) continue;
      const std::size_t eq = entry.find('=');
      if (eq == std::string::npos) continue;
      std::string key = entry.substr(prefix.size(), eq - prefix.size());
      for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      const std::string raw = entry.substr(eq + 1);
      // Values are parsed with the same grammar as the file.
      const Document parsed = parse_string("[env]\nvalue = " + raw + "\n");
      doc[section][key] = parsed.at("env").at("value");
    }
  }
}

namespace {

const Value* find(const Document& doc, const std::string& section, const std::string& key) {
  const auto sit = doc.find(section);
  if (sit == doc.end()) return nullptr;
  const auto kit = sit->second.find(key);
  if (kit == sit->second.end()) return nullptr;
  return &kit->second;
}

void check_known_keys(const Document& doc) {
  static const std::map<std::string, std::set<std::string>> kSchema = {
      {"plant",
       {"case", "model", "true_params", "noise_std", "disturbance",
        "disturbance_value", "disturbance_output", "reactor_volume_ml",
        "stock_concentrations"}},
      {"model", {"integrator_steps", "theta_lo", "theta_hi"}},
      {"constraints", {"epsilon"}},
      {"algorithm",
       {"alpha_j", "eta1", "eta2", "t1", "t2", "t3", "initial_radius", "n_starts",
        "gp_multistarts", "gp_refit_multistarts", "mc_samples", "backoff_tol",
        "backoff_max_passes",
        "solver_max_iterations", "gp_max_iterations", "mle_multistarts",
        "mle_max_iterations"}},
      {"campaign",
       {"method", "max_iterations", "tol1", "seed", "alpha", "initial_designs"}},
  };
  for (const auto& [section, table] : doc) {
    const auto sit = kSchema.find(section);
    if (sit == kSchema.end()) schema_error("unknown section [" + section + "]");
    for (const auto& [key, value] : table)
      if (!sit->second.count(key))
        schema_error("unknown key " + section + "." + key);
  }
}

}  // namespace

campaign::CampaignConfig build_campaign_config(const Document& doc) {
  check_known_keys(doc);
  campaign::CampaignConfig cfg;

  const Value* case_value = find(doc, "plant", "case");
  const std::string case_id = case_value ? case_value->as_string("plant.case") : "case1";
  if (case_id == "case1") {
    cfg.case_study = kinetics::make_case1();
  } else if (case_id == "case2") {
    double volume = 2.0, stock1 = 1.0, stock2 = 2.0;
    if (const Value* v = find(doc, "plant", "reactor_volume_ml"))
      volume = v->as_number("plant.reactor_volume_ml");
    if (const Value* v = find(doc, "plant", "stock_concentrations")) {
      const auto stocks = v->as_number_array("plant.stock_concentrations");
      if (stocks.size() != 2)
        schema_error("plant.stock_concentrations: expected exactly 2 entries");
      stock1 = stocks[0];
      stock2 = stocks[1];
    }
    cfg.case_study = kinetics::make_case2(volume, stock1, stock2);
  } else {
    schema_error("plant.case: expected \"case1\" or \"case2\", got \"" + case_id + "\"");
  }
  kinetics::CaseStudy& cs = cfg.case_study;

  if (const Value* v = find(doc, "plant", "model")) {
    const std::string& which = v->as_string("plant.model");
    if (which == "approx") {
      // Mismatch-free diagnostic plant: the identified structure is the truth.
      cs.plant.model = cs.approx_model;
      cs.plant.true_theta = Eigen::VectorXd();
      cs.plant.disturbance = kinetics::DisturbanceKind::None;
      cs.mismatch_free = true;
    } else if (which != "true") {
      schema_error("plant.model: expected \"true\" or \"approx\"");
    }
  }
  if (const Value* v = find(doc, "plant", "true_params")) {
    const auto params = v->as_number_array("plant.true_params");
    if (static_cast<int>(params.size()) != cs.plant.model.n_params)
      schema_error("plant.true_params: expected " +
                   std::to_string(cs.plant.model.n_params) + " entries, got " +
                   std::to_string(params.size()));
    cs.plant.true_theta =
        Eigen::Map<const Eigen::VectorXd>(params.data(), static_cast<Eigen::Index>(params.size()));
  }
  if (cs.plant.true_theta.size() == 0)
    schema_error("plant.true_params: required when plant.model = \"approx\"");
  if (const Value* v = find(doc, "plant", "noise_std")) {
    const auto noise = v->as_number_array("plant.noise_std");
    if (static_cast<int>(noise.size()) != cs.plant.model.n_species)
      schema_error("plant.noise_std: expected " +
                   std::to_string(cs.plant.model.n_species) + " entries");
    for (double sd : noise)
      if (sd < 0.0) schema_error("plant.noise_std: entries must be >= 0");
    cs.plant.noise_std =
        Eigen::Map<const Eigen::VectorXd>(noise.data(), static_cast<Eigen::Index>(noise.size()));
  }
  if (const Value* v = find(doc, "plant", "disturbance")) {
    const std::string& kind = v->as_string("plant.disturbance");
    if (kind == "none")
      cs.plant.disturbance = kinetics::DisturbanceKind::None;
    else if (kind == "additive")
      cs.plant.disturbance = kinetics::DisturbanceKind::AdditiveAll;
    else if (kind == "multiplicative")
      cs.plant.disturbance = kinetics::DisturbanceKind::MultiplicativeOutput;
    else
      schema_error("plant.disturbance: expected none|additive|multiplicative");
  }
  if (const Value* v = find(doc, "plant", "disturbance_value"))
    cs.plant.disturbance_value = v->as_number("plant.disturbance_value");
  if (const Value* v = find(doc, "plant", "disturbance_output")) {
    const int idx = v->as_int("plant.disturbance_output");
    if (idx < 1 || idx > cs.plant.model.n_species)
      schema_error("plant.disturbance_output: 1-based species index out of range");
    cs.plant.disturbance_output = idx - 1;
  }

  if (const Value* v = find(doc, "model", "integrator_steps")) {
    cfg.integrator_steps = v->as_int("model.integrator_steps");
    if (cfg.integrator_steps < 1) schema_error("model.integrator_steps: must be >= 1");
    cs.plant.integrator_steps = cfg.integrator_steps;
  }
  const auto load_theta_bound = [&](const char* key, Eigen::VectorXd& target) {
    if (const Value* v = find(doc, "model", key)) {
      const auto bound = v->as_number_array(std::string("model.") + key);
      if (static_cast<int>(bound.size()) != cs.approx_model.n_params)
        schema_error(std::string("model.") + key + ": expected " +
                     std::to_string(cs.approx_model.n_params) + " entries");
      target = Eigen::Map<const Eigen::VectorXd>(bound.data(),
                                                 static_cast<Eigen::Index>(bound.size()));
    }
  };
  load_theta_bound("theta_lo", cs.theta_lo);
  load_theta_bound("theta_hi", cs.theta_hi);

  if (const Value* v = find(doc, "constraints", "epsilon")) {
    const auto eps = v->as_number_array("constraints.epsilon");
    if (eps.size() != cs.constraints.size())
      schema_error("constraints.epsilon: expected " +
                   std::to_string(cs.constraints.size()) + " entries");
    for (std::size_t i = 0; i < eps.size(); ++i) {
      if (!(eps[i] > 0.0 && eps[i] < 1.0))
        schema_error("constraints.epsilon: entries must lie in (0, 1)");
      cs.constraints[i].epsilon = eps[i];
    }
  }

  campaign::AlgorithmParams& algo = cfg.algo;
  const auto load_number = [&](const char* key, double& target) {
    if (const Value* v = find(doc, "algorithm", key))
      target = v->as_number(std::string("algorithm.") + key);
  };
  const auto load_int = [&](const char* key, int& target) {
    if (const Value* v = find(doc, "algorithm", key))
      target = v->as_int(std::string("algorithm.") + key);
  };
  load_number("alpha_j", algo.alpha_j);
  load_number("eta1", algo.eta1);
  load_number("eta2", algo.eta2);
  load_number("t1", algo.t1);
  load_number("t2", algo.t2);
  load_number("t3", algo.t3);
  load_number("initial_radius", algo.initial_radius);
  load_int("n_starts", algo.n_starts);
  load_int("gp_multistarts", algo.gp_multistarts);
  load_int("gp_refit_multistarts", algo.gp_refit_multistarts);
  load_int("mc_samples", algo.mc_samples);
  load_number("backoff_tol", algo.backoff_tol);
  load_int("backoff_max_passes", algo.backoff_max_passes);
  load_int("solver_max_iterations", algo.solver_max_iterations);
  load_int("gp_max_iterations", algo.gp_max_iterations);
  load_int("mle_multistarts", algo.mle_multistarts);
  load_int("mle_max_iterations", algo.mle_max_iterations);

  if (const Value* v = find(doc, "campaign", "method"))
    cfg.method = campaign::method_from_name(v->as_string("campaign.method"));
  if (const Value* v = find(doc, "campaign", "max_iterations")) {
    cfg.max_iterations = v->as_int("campaign.max_iterations");
    if (cfg.max_iterations < 0) schema_error("campaign.max_iterations: must be >= 0");
  }
  if (const Value* v = find(doc, "campaign", "tol1"))
    cfg.tol1 = v->as_number("campaign.tol1");
  if (const Value* v = find(doc, "campaign", "seed")) {
    const double seed = v->as_number("campaign.seed");
    if (seed < 0.0 || std::floor(seed) != seed)
      schema_error("campaign.seed: must be a non-negative integer");
    cfg.seed = static_cast<std::uint64_t>(seed);
  }
  if (const Value* v = find(doc, "campaign", "alpha")) {
    cfg.alpha = v->as_number("campaign.alpha");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
      schema_error("campaign.alpha: must lie in (0, 1)");
  }
  if (const Value* v = find(doc, "campaign", "initial_designs")) {
    const auto rows = v->as_matrix("campaign.initial_designs");
    if (rows.empty()) schema_error("campaign.initial_designs: must not be empty");
    cs.initial_designs.resize(static_cast<Eigen::Index>(rows.size()), cs.bounds.dim());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (static_cast<Eigen::Index>(rows[i].size()) != cs.bounds.dim())
        schema_error("campaign.initial_designs[" + std::to_string(i) + "]: expected " +
                     std::to_string(cs.bounds.dim()) + " entries");
      for (Eigen::Index j = 0; j < cs.bounds.dim(); ++j)
        cs.initial_designs(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
    }
  }

  try {
    cfg.algo.validate();
    cs.plant.validate();
  } catch (const Error& e) {
    schema_error(e.what());
  }
  return cfg;
}

Document resolved_document(const campaign::CampaignConfig& config) {
  const kinetics::CaseStudy& cs = config.case_study;
  Document doc;

  Table& plant = doc["plant"];
  plant["case"] = Value::of(cs.id);
  plant["model"] = Value::of(std::string(cs.mismatch_free ? "approx" : "true"));
  if (cs.id == "case2") {
    plant["reactor_volume_ml"] = Value::of(cs.reactor_volume_ml);
    plant["stock_concentrations"] = Value::of(std::vector<Value>{
        Value::of(cs.stock1_molar), Value::of(cs.stock2_molar)});
  }
  {
    std::vector<Value> params;
    for (Eigen::Index i = 0; i < cs.plant.true_theta.size(); ++i)
      params.push_back(Value::of(cs.plant.true_theta[i]));
    plant["true_params"] = Value::of(std::move(params));
    std::vector<Value> noise;
    for (Eigen::Index i = 0; i < cs.plant.noise_std.size(); ++i)
      noise.push_back(Value::of(cs.plant.noise_std[i]));
    plant["noise_std"] = Value::of(std::move(noise));
  }
  switch (cs.plant.disturbance) {
    case kinetics::DisturbanceKind::None:
      plant["disturbance"] = Value::of(std::string("none"));
      break;
    case kinetics::DisturbanceKind::AdditiveAll:
      plant["disturbance"] = Value::of(std::string("additive"));
      break;
    case kinetics::DisturbanceKind::MultiplicativeOutput:
      plant["disturbance"] = Value::of(std::string("multiplicative"));
      break;
  }
  plant["disturbance_value"] = Value::of(cs.plant.disturbance_value);
  plant["disturbance_output"] = Value::of(static_cast<double>(cs.plant.disturbance_output + 1));

  Table& model = doc["model"];
  model["integrator_steps"] = Value::of(static_cast<double>(config.integrator_steps));
  {
    std::vector<Value> lo, hi;
    for (Eigen::Index i = 0; i < cs.theta_lo.size(); ++i) {
      lo.push_back(Value::of(cs.theta_lo[i]));
      hi.push_back(Value::of(cs.theta_hi[i]));
    }
    model["theta_lo"] = Value::of(std::move(lo));
    model["theta_hi"] = Value::of(std::move(hi));
  }

  Table& constraints = doc["constraints"];
  {
    std::vector<Value> eps;
    for (const kinetics::ConstraintDef& c : cs.constraints)
      eps.push_back(Value::of(c.epsilon));
    constraints["epsilon"] = Value::of(std::move(eps));
  }

  Table& algorithm = doc["algorithm"];
  algorithm["alpha_j"] = Value::of(config.algo.alpha_j);
  algorithm["eta1"] = Value::of(config.algo.eta1);
  algorithm["eta2"] = Value::of(config.algo.eta2);
  algorithm["t1"] = Value::of(config.algo.t1);
  algorithm["t2"] = Value::of(config.algo.t2);
  algorithm["t3"] = Value::of(config.algo.t3);
  algorithm["initial_radius"] = Value::of(config.algo.initial_radius);
  algorithm["n_starts"] = Value::of(static_cast<double>(config.algo.n_starts));
  algorithm["gp_multistarts"] = Value::of(static_cast<double>(config.algo.gp_multistarts));
  algorithm["gp_refit_multistarts"] =
      Value::of(static_cast<double>(config.algo.gp_refit_multistarts));
  algorithm["mc_samples"] = Value::of(static_cast<double>(config.algo.mc_samples));
  algorithm["backoff_tol"] = Value::of(config.algo.backoff_tol);
  algorithm["backoff_max_passes"] =
      Value::of(static_cast<double>(config.algo.backoff_max_passes));
  algorithm["solver_max_iterations"] =
      Value::of(static_cast<double>(config.algo.solver_max_iterations));
  algorithm["gp_max_iterations"] =
      Value::of(static_cast<double>(config.algo.gp_max_iterations));
  algorithm["mle_multistarts"] = Value::of(static_cast<double>(config.algo.mle_multistarts));
  algorithm["mle_max_iterations"] =
      Value::of(static_cast<double>(config.algo.mle_max_iterations));

  Table& campaign_table = doc["campaign"];
  campaign_table["method"] = Value::of(std::string(campaign::method_name(config.method)));
  campaign_table["max_iterations"] = Value::of(static_cast<double>(config.max_iterations));
  campaign_table["tol1"] = Value::of(config.tol1);
  campaign_table["seed"] = Value::of(static_cast<double>(config.seed));
  campaign_table["alpha"] = Value::of(config.alpha);
  {
    std::vector<Value> rows;
    for (Eigen::Index i = 0; i < cs.initial_designs.rows(); ++i) {
      std::vector<Value> row;
      for (Eigen::Index j = 0; j < cs.initial_designs.cols(); ++j)
        row.push_back(Value::of(cs.initial_designs(i, j)));
      rows.push_back(Value::of(std::move(row)));
    }
    campaign_table["initial_designs"] = Value::of(std::move(rows));
  }
  return doc;
}

}  // namespace safedoe::config
