#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "models.hpp"
#include "risk.hpp"

namespace deconv {

//! Declarative description of a Monte Carlo study: scenarios, sample sizes,
//! estimators, bandwidth modes and grid settings.
struct ExperimentConfig
{
  std::string study = "risk";  // "risk" or "compare_symmetric"
  std::size_t reps = 500;
  KernelKind kernel = KernelKind::gaussian;
  LossKind loss = LossKind::density_l2;
  std::uint64_t seed = 1;
  std::vector<std::size_t> n_values;
  std::vector<EstimatorId> estimators{ EstimatorId::kotlarski };
  std::vector<BandwidthMode> modes{ BandwidthMode::oracle };
  double u_max = 30.0;
  double step = 0.05;
  double tail_tol = 1e-6;
  std::string output = "out";
  std::vector<Scenario> scenarios;
};

namespace detail {

inline std::string trim(const std::string& s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> tokens(const std::string& s)
{
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

[[noreturn]] inline void bad_key(const std::string& key, const std::string& why)
{
  throw std::invalid_argument("config key '" + key + "': " + why);
}

}  // namespace detail

//! Flat key-value format with [experiment] and repeated [scenario] sections;
//! '#' starts a comment.  Unknown keys are rejected by name.
inline ExperimentConfig parse_config(std::istream& is)
{
  ExperimentConfig cfg;
  cfg.n_values.clear();
  std::string section;
  std::string line;
  Scenario* current = nullptr;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": malformed section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section == "scenario") {
        cfg.scenarios.push_back({});
        current = &cfg.scenarios.back();
      } else if (section == "experiment") {
        current = nullptr;
      } else {
        throw std::invalid_argument("config: unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));

    if (section == "scenario") {
      if (key == "label") current->label = value;
      else if (key == "x") current->x = parse_model(value);
      else if (key == "eps") current->eps = parse_model(value);
      else detail::bad_key(key, "unknown scenario key");
      continue;
    }
    if (section != "experiment")
      throw std::invalid_argument("config: key '" + key + "' outside a section");

    if (key == "study") {
      if (value != "risk" && value != "compare_symmetric")
        detail::bad_key(key, "must be 'risk' or 'compare_symmetric'");
      cfg.study = value;
    } else if (key == "reps") {
      cfg.reps = std::stoull(value);
    } else if (key == "kernel") {
      if (value == "gaussian") cfg.kernel = KernelKind::gaussian;
      else if (value == "sinc") cfg.kernel = KernelKind::sinc;
      else detail::bad_key(key, "must be 'gaussian' or 'sinc'");
    } else if (key == "loss") {
      if (value == "density_l2") cfg.loss = LossKind::density_l2;
      else if (value == "cf_l2") cfg.loss = LossKind::cf_l2;
      else detail::bad_key(key, "must be 'density_l2' or 'cf_l2'");
    } else if (key == "seed") {
      cfg.seed = std::stoull(value);
    } else if (key == "n") {
      cfg.n_values.clear();
      for (const auto& t : detail::tokens(value))
        cfg.n_values.push_back(std::stoull(t));
    } else if (key == "estimators") {
      cfg.estimators.clear();
      for (const auto& t : detail::tokens(value))
        cfg.estimators.push_back(estimator_from_string(t));
    } else if (key == "modes") {
      cfg.modes.clear();
      for (const auto& t : detail::tokens(value)) {
        if (t == "oracle") cfg.modes.push_back(BandwidthMode::oracle);
        else if (t == "adaptive") cfg.modes.push_back(BandwidthMode::adaptive);
        else detail::bad_key(key, "mode must be 'oracle' or 'adaptive'");
      }
    } else if (key == "u_max") {
      cfg.u_max = std::stod(value);
    } else if (key == "step") {
      cfg.step = std::stod(value);
    } else if (key == "tail_tol") {
      cfg.tail_tol = std::stod(value);
    } else if (key == "output") {
      cfg.output = value;
    } else {
      detail::bad_key(key, "unknown experiment key");
    }
  }
  return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path)
{
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot read config file '" + path + "'");
  return parse_config(is);
}

//! Lists every violated invariant without running the study.
inline std::vector<std::string> validate(const ExperimentConfig& cfg)
{
  std::vector<std::string> diags;
  if (cfg.scenarios.empty()) diags.push_back("no [scenario] section given");
  if (cfg.n_values.empty()) diags.push_back("key 'n': no sample sizes given");
  if (cfg.reps < 1) diags.push_back("key 'reps': must be >= 1");
  if (!(cfg.u_max > 0.0) || !(cfg.step > 0.0)) {
    diags.push_back("keys 'u_max'/'step': must be positive");
  } else {
    const double ratio = cfg.u_max / cfg.step;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
      diags.push_back("key 'step': does not divide u_max");
  }
  for (const auto& sc : cfg.scenarios) {
    const double m = mean(sc.eps);
    if (std::abs(m) > 1e-9) {
      std::ostringstream os;
      os << "scenario '" << sc.label << "': error model mean = " << m
         << ", must be 0";
      diags.push_back(os.str());
    }
    if (sc.label.empty()) diags.push_back("scenario without a label");
  }
  const bool adaptive =
    cfg.study == "risk" &&
    std::find(cfg.modes.begin(), cfg.modes.end(), BandwidthMode::adaptive) !=
      cfg.modes.end();
  if (adaptive)
    for (auto n : cfg.n_values)
      if (n < 15)
        diags.push_back("key 'n': adaptive mode needs n >= 15, got " +
                        std::to_string(n));
  for (const auto& tol : { cfg.tail_tol })
    if (!(tol > 0.0)) diags.push_back("key 'tail_tol': must be positive");
  return diags;
}

inline std::vector<std::string> validate_file(const std::string& path)
{
  try {
    return validate(parse_config_file(path));
  } catch (const std::exception& e) {
    return { e.what() };
  }
}

}  // namespace deconv
