#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "degenfd/degenfd.hpp"

namespace degenfd::cli {

struct CoupleToH {};
struct PresetRho {};
struct CflRho {
  double safety;
};

struct RunConfig {
  std::string problem = "example1";
  ManufacturedProblem resolved_problem = builtin_example("example1");
  double h = 0.01;
  std::variant<double, CoupleToH> epsilon = CoupleToH{};
  std::variant<double, PresetRho, CflRho> rho = PresetRho{};
  std::optional<double> pseudo_time;
  std::optional<double> residual_tol;
  std::size_t max_iters = 100'000'000;
  std::size_t history_every = 1000;
  InitialGuess initial = InitialGuess::Ansatz;
  std::string solution_csv = "solution.csv";
  std::string report_json = "report.json";
  std::uint64_t seed = 0;
  std::size_t trials = 1000;
  std::vector<double> consistency_h{0.1, 0.05, 0.025, 0.0125};

  double eps_value() const { return std::holds_alternative<CoupleToH>(epsilon) ? h : std::get<double>(epsilon); }
};

namespace detail {

inline double parse_number(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw InputError("'" + key + "' expects a number, got '" + text + "'");
  }
  if (used != text.size()) throw InputError("'" + key + "' expects a number, got '" + text + "'");
  return v;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (in >> item) {
    if (item.back() == ',') item.pop_back();
    if (!item.empty()) out.push_back(parse_number(key, item));
  }
  if (out.empty()) throw InputError("'" + key + "' expects a non-empty list of numbers");
  return out;
}

inline std::size_t parse_count(const std::string& key, const std::string& text) {
  const double v = parse_number(key, text);
  if (!(v >= 0.0) || v != std::floor(v)) throw InputError("'" + key + "' expects a non-negative integer");
  return static_cast<std::size_t>(v);
}

inline DegeneracyLaw parse_law(const boost::property_tree::ptree& sec) {
  const auto kind = sec.get<std::string>("law", "constant");
  if (kind == "constant") return DegeneracyLaw::constant(parse_number("theta", sec.get<std::string>("theta", "2")));
  if (kind == "transmission") {
    const auto orient = sec.get<std::string>("orientation", "positive_gets_theta2");
    if (orient != "positive_gets_theta2" && orient != "positive_gets_theta1")
      throw InputError("unknown orientation '" + orient + "'");
    return DegeneracyLaw::transmission(parse_number("theta1", sec.get<std::string>("theta1", "2")),
                                       parse_number("theta2", sec.get<std::string>("theta2", "4")), 1.0,
                                       orient == "positive_gets_theta2" ? Orientation::PositiveGetsTheta2
                                                                        : Orientation::PositiveGetsTheta1);
  }
  throw InputError("unknown law '" + kind + "'");
}

}  // namespace detail

/// Parses an INI config. Unknown sections or keys are rejected so typos
/// surface as input errors.
inline RunConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  const std::map<std::string, std::vector<std::string>> known{
      {"problem", {"name", "lower", "upper", "coefficients", "law", "theta", "theta1", "theta2", "orientation",
                   "initial"}},
      {"discretization", {"h", "epsilon"}},
      {"solver", {"rho", "pseudo_time", "residual_tol", "max_iters", "history_every"}},
      {"output", {"solution_csv", "report_json"}},
      {"verify", {"seed", "trials", "consistency_h"}}};
  for (const auto& [section, body] : tree) {
    auto it = known.find(section);
    if (it == known.end()) throw InputError("config: unknown section [" + section + "]");
    for (const auto& [key, value] : body)
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
        throw InputError("config: unknown key '" + key + "' in [" + section + "]");
  }

  RunConfig cfg;
  const pt::ptree empty;
  const auto& prob = tree.get_child("problem", empty);
  const auto& disc = tree.get_child("discretization", empty);
  const auto& solv = tree.get_child("solver", empty);
  const auto& outp = tree.get_child("output", empty);
  const auto& ver = tree.get_child("verify", empty);

  cfg.problem = prob.get<std::string>("name", "example1");
  if (cfg.problem == "polynomial") {
    cfg.resolved_problem = polynomial_problem(
        "polynomial", detail::parse_number("lower", prob.get<std::string>("lower", "-1")),
        detail::parse_number("upper", prob.get<std::string>("upper", "1")),
        detail::parse_list("coefficients", prob.get<std::string>("coefficients", "")), detail::parse_law(prob));
    if (!(cfg.resolved_problem.upper[0] > cfg.resolved_problem.lower[0]))
      throw InputError("polynomial problem needs lower < upper");
  } else {
    cfg.resolved_problem = builtin_example(cfg.problem);
  }
  const auto initial = prob.get<std::string>("initial", "ansatz");
  if (initial == "ansatz") cfg.initial = InitialGuess::Ansatz;
  else if (initial == "zero") cfg.initial = InitialGuess::Zero;
  else throw InputError("unknown initial guess '" + initial + "'");

  cfg.h = detail::parse_number("h", disc.get<std::string>("h", "0.01"));
  if (!(cfg.h > 0.0)) throw InputError("h must be positive");
  const auto eps = disc.get<std::string>("epsilon", "couple_to_h");
  if (eps == "couple_to_h") cfg.epsilon = CoupleToH{};
  else cfg.epsilon = detail::parse_number("epsilon", eps);

  const auto rho = solv.get<std::string>("rho", "preset_0.01h2");
  if (rho == "preset_0.01h2") cfg.rho = PresetRho{};
  else if (rho.rfind("cfl:", 0) == 0) cfg.rho = CflRho{detail::parse_number("rho", rho.substr(4))};
  else cfg.rho = detail::parse_number("rho", rho);

  if (auto t = solv.get_optional<std::string>("pseudo_time")) cfg.pseudo_time = detail::parse_number("pseudo_time", *t);
  if (auto t = solv.get_optional<std::string>("residual_tol"))
    cfg.residual_tol = detail::parse_number("residual_tol", *t);
  if (cfg.pseudo_time && cfg.residual_tol)
    throw InputError("pseudo_time and residual_tol are mutually exclusive stopping modes");
  if (!cfg.pseudo_time && !cfg.residual_tol) cfg.residual_tol = cfg.h;
  cfg.max_iters = detail::parse_count("max_iters", solv.get<std::string>("max_iters", "100000000"));
  cfg.history_every = detail::parse_count("history_every", solv.get<std::string>("history_every", "1000"));

  cfg.solution_csv = outp.get<std::string>("solution_csv", cfg.solution_csv);
  cfg.report_json = outp.get<std::string>("report_json", cfg.report_json);

  cfg.seed = detail::parse_count("seed", ver.get<std::string>("seed", "0"));
  cfg.trials = detail::parse_count("trials", ver.get<std::string>("trials", "1000"));
  if (cfg.trials == 0) throw InputError("trials must be at least 1");
  if (auto l = ver.get_optional<std::string>("consistency_h")) cfg.consistency_h = detail::parse_list("consistency_h", *l);
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config '" + path.string() + "'");
  return parse_config(in);
}

inline double resolve_rho(const RunConfig& cfg, const Scheme& s) {
  if (std::holds_alternative<PresetRho>(cfg.rho)) return preset_rho(cfg.h);
  if (const auto* c = std::get_if<CflRho>(&cfg.rho)) return cfl_rho(s, c->safety);
  return std::get<double>(cfg.rho);
}

inline SolverConfig solver_config(const RunConfig& cfg, const Scheme& s) {
  SolverConfig sc;
  sc.rho = resolve_rho(cfg, s);
  sc.max_iters = cfg.max_iters;
  sc.residual_tol = cfg.residual_tol.value_or(0.0);
  sc.target_pseudo_time = cfg.pseudo_time;
  sc.record_history_every = cfg.history_every;
  return sc;
}

/// Every setting after defaults and couplings are applied.
inline nlohmann::ordered_json resolved_json(const RunConfig& cfg, const Scheme& s) {
  nlohmann::ordered_json j;
  j["problem"] = cfg.problem;
  j["law"] = cfg.resolved_problem.with_eps(cfg.eps_value()).law.describe();
  j["lower"] = cfg.resolved_problem.lower;
  j["upper"] = cfg.resolved_problem.upper;
  j["h"] = cfg.h;
  j["epsilon_mode"] = std::holds_alternative<CoupleToH>(cfg.epsilon) ? "couple_to_h" : "fixed";
  j["epsilon"] = cfg.eps_value();
  if (std::holds_alternative<PresetRho>(cfg.rho)) j["rho_mode"] = "preset_0.01h2";
  else if (const auto* c = std::get_if<CflRho>(&cfg.rho)) j["rho_mode"] = "cfl:" + std::to_string(c->safety);
  else j["rho_mode"] = "fixed";
  j["rho"] = resolve_rho(cfg, s);
  if (cfg.pseudo_time) j["pseudo_time"] = *cfg.pseudo_time;
  else j["residual_tol"] = *cfg.residual_tol;
  j["max_iters"] = cfg.max_iters;
  j["history_every"] = cfg.history_every;
  j["initial"] = cfg.initial == InitialGuess::Ansatz ? "ansatz" : "zero";
  j["solution_csv"] = cfg.solution_csv;
  j["report_json"] = cfg.report_json;
  j["seed"] = cfg.seed;
  j["trials"] = cfg.trials;
  j["consistency_h"] = cfg.consistency_h;
  return j;
}

}  // namespace degenfd::cli
