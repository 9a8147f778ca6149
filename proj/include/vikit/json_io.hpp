#pragma once

#include <string>

#include <json.hpp>

#include "vikit/operators.hpp"
#include "vikit/solvers.hpp"

namespace vikit {

// Serialization for problem instances, solver configs and run reports.
// Parsing is strict: unknown keys and missing required keys raise IoError
// naming the field, so format drift is caught instead of silently ignored.

nlohmann::json matrix_to_json(const DenseMatrix& m);
DenseMatrix matrix_from_json(const nlohmann::json& j, const std::string& field);
Vector vector_from_json(const nlohmann::json& j, const std::string& field);

nlohmann::json set_to_json(const FeasibleSet& c);
FeasibleSet set_from_json(const nlohmann::json& j);

nlohmann::json operator_to_json(const VIOperator& op);
VIOperator operator_from_json(const nlohmann::json& j);

nlohmann::json problem_to_json(const VIProblem& p);
VIProblem problem_from_json(const nlohmann::json& j);

VIProblem load_problem(const std::string& path);
void save_problem(const std::string& path, const VIProblem& p);

nlohmann::json config_to_json(const SolverConfig& cfg);
SolverConfig config_from_json(const nlohmann::json& j);
SolverConfig load_config(const std::string& path);

nlohmann::json report_to_json(const RunReport& rep);

}  // namespace vikit
