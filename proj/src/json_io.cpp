#include "vikit/json_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace vikit {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) throw IoError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) throw IoError(where + ": unknown key '" + key + "'");
  }
}

const json& need(const json& j, const std::string& where, const std::string& key) {
  if (!j.contains(key)) throw IoError(where + ": missing key '" + key + "'");
  return j.at(key);
}

double need_number(const json& j, const std::string& where, const std::string& key) {
  const json& v = need(j, where, key);
  if (!v.is_number()) throw IoError(where + ": '" + key + "' must be a number");
  return v.get<double>();
}

double opt_number(const json& j, const std::string& where, const std::string& key,
                  double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) throw IoError(where + ": '" + key + "' must be a number");
  return v.get<double>();
}

bool opt_bool(const json& j, const std::string& where, const std::string& key,
              bool fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_boolean()) throw IoError(where + ": '" + key + "' must be a boolean");
  return v.get<bool>();
}

std::string need_string(const json& j, const std::string& where, const std::string& key) {
  const json& v = need(j, where, key);
  if (!v.is_string()) throw IoError(where + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

json matrix_to_json(const DenseMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

DenseMatrix matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw IoError(field + ": expected a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array()) throw IoError(field + ": rows must be arrays");
  const std::size_t cols = j[0].size();
  std::vector<double> data;
  data.reserve(rows * cols);
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != cols) throw IoError(field + ": ragged rows");
    for (const auto& v : row) {
      if (!v.is_number()) throw IoError(field + ": non-numeric entry");
      data.push_back(v.get<double>());
    }
  }
  try {
    return DenseMatrix(rows, cols, std::move(data));
  } catch (const DimensionError& e) {
    throw IoError(field + ": " + e.what());
  }
}

Vector vector_from_json(const json& j, const std::string& field) {
  if (!j.is_array()) throw IoError(field + ": expected an array");
  Vector out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw IoError(field + ": non-numeric entry");
    out.push_back(v.get<double>());
  }
  if (!all_finite(out)) throw IoError(field + ": non-finite entry");
  return out;
}

namespace {

// Box bounds allow null for an unbounded side.
json bound_to_json(const Vector& v, bool is_lower) {
  const double inf = std::numeric_limits<double>::infinity();
  json out = json::array();
  for (double x : v) {
    if ((is_lower && x == -inf) || (!is_lower && x == inf)) {
      out.push_back(nullptr);
    } else {
      out.push_back(x);
    }
  }
  return out;
}

Vector bound_from_json(const json& j, const std::string& field, bool is_lower) {
  if (!j.is_array()) throw IoError(field + ": expected an array");
  const double inf = std::numeric_limits<double>::infinity();
  Vector out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (v.is_null()) {
      out.push_back(is_lower ? -inf : inf);
    } else if (v.is_number()) {
      out.push_back(v.get<double>());
    } else {
      throw IoError(field + ": entries must be numbers or null");
    }
  }
  return out;
}

}  // namespace

json set_to_json(const FeasibleSet& c) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, WholeSpace>) {
          return {{"type", "whole_space"}, {"dim", s.dim}};
        } else if constexpr (std::is_same_v<T, HalfSpace>) {
          return {{"type", "half_space"}, {"a", s.a}, {"c", s.c}};
        } else if constexpr (std::is_same_v<T, AffineSet>) {
          return {{"type", "affine"}, {"a_mat", matrix_to_json(s.a())}, {"b", s.b()}};
        } else if constexpr (std::is_same_v<T, Box>) {
          return {{"type", "box"},
                  {"lo", bound_to_json(s.lo, true)},
                  {"hi", bound_to_json(s.hi, false)}};
        } else {
          return {{"type", "polyhedron"},
                  {"g_mat", matrix_to_json(s.g_mat())},
                  {"g_vec", s.g_vec()}};
        }
      },
      c);
}

FeasibleSet set_from_json(const json& j) {
  const std::string type = need_string(j, "set", "type");
  try {
    if (type == "whole_space") {
      check_keys(j, "set", {"type", "dim"});
      const double d = need_number(j, "set", "dim");
      if (d < 1 || d != std::floor(d)) throw IoError("set: 'dim' must be a positive integer");
      return WholeSpace{static_cast<std::size_t>(d)};
    }
    if (type == "half_space") {
      check_keys(j, "set", {"type", "a", "c"});
      return HalfSpace(vector_from_json(need(j, "set", "a"), "set.a"),
                       need_number(j, "set", "c"));
    }
    if (type == "affine") {
      check_keys(j, "set", {"type", "a_mat", "b"});
      return AffineSet(matrix_from_json(need(j, "set", "a_mat"), "set.a_mat"),
                       vector_from_json(need(j, "set", "b"), "set.b"));
    }
    if (type == "box") {
      check_keys(j, "set", {"type", "lo", "hi"});
      return Box(bound_from_json(need(j, "set", "lo"), "set.lo", true),
                 bound_from_json(need(j, "set", "hi"), "set.hi", false));
    }
    if (type == "polyhedron") {
      check_keys(j, "set", {"type", "g_mat", "g_vec"});
      return Polyhedron(matrix_from_json(need(j, "set", "g_mat"), "set.g_mat"),
                        vector_from_json(need(j, "set", "g_vec"), "set.g_vec"));
    }
  } catch (const DimensionError& e) {
    throw IoError(std::string("set: ") + e.what());
  }
  throw IoError("set: unknown type '" + type + "'");
}

json operator_to_json(const VIOperator& op) {
  json j = std::visit(
      [](const auto& o) -> json {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, AffineOperator>) {
          return {{"type", "affine"}, {"matrix", matrix_to_json(o.m)}, {"q", o.q}};
        } else if constexpr (std::is_same_v<T, AntidiagonalOperator>) {
          return {{"type", "antidiagonal"}, {"dim", o.dim}};
        } else {
          return {{"type", "scaled"}, {"inner", operator_to_json(*o.inner)}};
        }
      },
      op.impl());
  j["monotonicity"] = to_string(op.monotonicity());
  return j;
}

VIOperator operator_from_json(const json& j) {
  const std::string type = need_string(j, "operator", "type");
  try {
    if (type == "affine") {
      check_keys(j, "operator", {"type", "matrix", "q", "monotonicity"});
      return VIOperator(
          AffineOperator{matrix_from_json(need(j, "operator", "matrix"), "operator.matrix"),
                         vector_from_json(need(j, "operator", "q"), "operator.q")},
          monotonicity_from_string(need_string(j, "operator", "monotonicity")));
    }
    if (type == "antidiagonal") {
      check_keys(j, "operator", {"type", "dim", "monotonicity"});
      const double d = need_number(j, "operator", "dim");
      if (d < 1 || d != std::floor(d)) {
        throw IoError("operator: 'dim' must be a positive integer");
      }
      return VIOperator(AntidiagonalOperator{static_cast<std::size_t>(d)});
    }
    if (type == "scaled") {
      check_keys(j, "operator", {"type", "inner", "monotonicity"});
      return VIOperator::scaled_of(operator_from_json(need(j, "operator", "inner")));
    }
  } catch (const DimensionError& e) {
    throw IoError(std::string("operator: ") + e.what());
  } catch (const ConfigError& e) {
    throw IoError(std::string("operator: ") + e.what());
  }
  throw IoError("operator: unknown type '" + type + "'");
}

json problem_to_json(const VIProblem& p) {
  json j{{"schema", 1},
         {"generator", p.generator},
         {"seed", p.seed},
         {"m", p.m},
         {"k", p.k},
         {"operator", operator_to_json(p.op)},
         {"set", set_to_json(p.set)}};
  if (p.known_solution) {
    j["known_solution"] = *p.known_solution;
  } else {
    j["known_solution"] = nullptr;
  }
  return j;
}

VIProblem problem_from_json(const json& j) {
  check_keys(j, "problem",
             {"schema", "generator", "seed", "m", "k", "operator", "set", "known_solution"});
  const double schema = need_number(j, "problem", "schema");
  if (schema != 1) throw IoError("problem: unsupported schema version");
  VIProblem p{operator_from_json(need(j, "problem", "operator")),
              set_from_json(need(j, "problem", "set")),
              std::nullopt,
              j.contains("generator") ? need_string(j, "problem", "generator") : "",
              0,
              0,
              0};
  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_unsigned()) throw IoError("problem: 'seed' must be a nonnegative integer");
    p.seed = s.get<std::uint64_t>();
  }
  p.m = static_cast<std::size_t>(opt_number(j, "problem", "m", 0.0));
  p.k = static_cast<std::size_t>(opt_number(j, "problem", "k", 0.0));
  if (j.contains("known_solution") && !j.at("known_solution").is_null()) {
    p.known_solution = vector_from_json(j.at("known_solution"), "problem.known_solution");
  }
  try {
    validate_problem(p);
  } catch (const ConfigError& e) {
    throw IoError(std::string("problem: ") + e.what());
  }
  return p;
}

VIProblem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open problem file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("problem file '" + path + "': " + e.what());
  }
  return problem_from_json(j);
}

void save_problem(const std::string& path, const VIProblem& p) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write problem file '" + path + "'");
  out << problem_to_json(p).dump(2) << '\n';
}

json config_to_json(const SolverConfig& cfg) {
  json j{{"algorithm", to_string(cfg.algorithm)},
         {"gamma", cfg.gamma},
         {"sigma", cfg.sigma},
         {"beta", cfg.beta},
         {"delta", cfg.delta},
         {"unvalidated", cfg.unvalidated},
         {"max_backtracks", cfg.max_backtracks},
         {"rho", cfg.rho},
         {"mu", cfg.mu},
         {"sigma_ls", cfg.sigma_ls},
         {"ispm_alpha", cfg.ispm_alpha},
         {"record_history", cfg.record_history},
         {"check_invariants", cfg.check_invariants}};
  if (cfg.alpha.values.empty()) {
    j["alpha"] = cfg.alpha.cap;
  } else {
    j["alpha"] = {{"cap", cfg.alpha.cap}, {"values", cfg.alpha.values}};
  }
  if (cfg.lambda) j["lambda"] = *cfg.lambda;
  json stop = json::object();
  if (cfg.stopping.eps_x_norm) stop["eps_x_norm"] = *cfg.stopping.eps_x_norm;
  if (cfg.stopping.eps_residual) stop["eps_residual"] = *cfg.stopping.eps_residual;
  stop["max_iter"] = cfg.stopping.max_iter;
  j["stopping"] = std::move(stop);
  switch (cfg.start.kind) {
    case StartPoint::Kind::ones: j["start"] = "ones"; break;
    case StartPoint::Kind::e1: j["start"] = "e1"; break;
    case StartPoint::Kind::explicit_vec: j["start"] = cfg.start.value; break;
  }
  return j;
}

SolverConfig config_from_json(const json& j) {
  check_keys(j, "config",
             {"algorithm", "gamma", "sigma", "alpha", "beta", "delta", "unvalidated",
              "max_backtracks", "lambda", "rho", "mu", "sigma_ls", "ispm_alpha", "stopping",
              "start", "record_history", "check_invariants"});
  SolverConfig cfg;
  try {
    cfg.algorithm = algorithm_from_string(need_string(j, "config", "algorithm"));
  } catch (const ConfigError& e) {
    throw IoError(std::string("config: ") + e.what());
  }
  cfg.gamma = opt_number(j, "config", "gamma", cfg.gamma);
  cfg.sigma = opt_number(j, "config", "sigma", cfg.sigma);
  if (j.contains("alpha")) {
    const json& a = j.at("alpha");
    if (a.is_number()) {
      cfg.alpha.cap = a.get<double>();
    } else if (a.is_object()) {
      check_keys(a, "config.alpha", {"cap", "values"});
      cfg.alpha.cap = need_number(a, "config.alpha", "cap");
      if (a.contains("values")) {
        cfg.alpha.values = vector_from_json(a.at("values"), "config.alpha.values");
      }
    } else {
      throw IoError("config: 'alpha' must be a number or an object");
    }
  }
  cfg.beta = opt_number(j, "config", "beta", cfg.beta);
  cfg.delta = opt_number(j, "config", "delta", cfg.delta);
  cfg.unvalidated = opt_bool(j, "config", "unvalidated", cfg.unvalidated);
  cfg.max_backtracks =
      static_cast<int>(opt_number(j, "config", "max_backtracks", cfg.max_backtracks));
  if (j.contains("lambda")) cfg.lambda = need_number(j, "config", "lambda");
  cfg.rho = opt_number(j, "config", "rho", cfg.rho);
  cfg.mu = opt_number(j, "config", "mu", cfg.mu);
  cfg.sigma_ls = opt_number(j, "config", "sigma_ls", cfg.sigma_ls);
  cfg.ispm_alpha = opt_number(j, "config", "ispm_alpha", cfg.ispm_alpha);
  if (j.contains("stopping")) {
    const json& s = j.at("stopping");
    check_keys(s, "config.stopping", {"eps_x_norm", "eps_residual", "max_iter"});
    if (s.contains("eps_x_norm")) {
      cfg.stopping.eps_x_norm = need_number(s, "config.stopping", "eps_x_norm");
    }
    if (s.contains("eps_residual")) {
      cfg.stopping.eps_residual = need_number(s, "config.stopping", "eps_residual");
    }
    cfg.stopping.max_iter =
        static_cast<long>(opt_number(s, "config.stopping", "max_iter",
                                     static_cast<double>(cfg.stopping.max_iter)));
  }
  if (j.contains("start")) {
    const json& s = j.at("start");
    if (s.is_string()) {
      const std::string name = s.get<std::string>();
      if (name == "ones") {
        cfg.start.kind = StartPoint::Kind::ones;
      } else if (name == "e1") {
        cfg.start.kind = StartPoint::Kind::e1;
      } else {
        throw IoError("config: 'start' must be \"ones\", \"e1\" or an array");
      }
    } else if (s.is_array()) {
      cfg.start.kind = StartPoint::Kind::explicit_vec;
      cfg.start.value = vector_from_json(s, "config.start");
    } else {
      throw IoError("config: 'start' must be \"ones\", \"e1\" or an array");
    }
  }
  cfg.record_history = opt_bool(j, "config", "record_history", cfg.record_history);
  cfg.check_invariants = opt_bool(j, "config", "check_invariants", cfg.check_invariants);
  return cfg;
}

SolverConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("config file '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

json report_to_json(const RunReport& rep) {
  json j{{"algorithm", to_string(rep.algorithm)},
         {"iterations", rep.iterations},
         {"inner_evals", rep.inner_evals},
         {"wall_seconds", rep.wall_seconds},
         {"termination", rep.termination},
         {"converged", rep.converged},
         {"final_x_norm", norm(rep.final_x)},
         {"final_x", rep.final_x}};
  if (rep.invariants.enabled) {
    j["invariants"] = {{"rate_checked", rep.invariants.rate_checked},
                       {"checked_iterations", rep.invariants.checked_iterations},
                       {"linesearch_cert", rep.invariants.linesearch_cert_violations},
                       {"halfspace_gap", rep.invariants.halfspace_gap_violations},
                       {"solution_cut", rep.invariants.solution_cut_violations},
                       {"distance_decrease", rep.invariants.distance_decrease_violations},
                       {"rate_bound", rep.invariants.rate_bound_violations},
                       {"total", rep.invariants.total()},
                       {"samples", rep.invariants.samples}};
  } else {
    j["invariants"] = nullptr;
  }
  return j;
}

}  // namespace vikit
