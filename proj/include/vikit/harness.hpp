#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "vikit/solvers.hpp"

namespace vikit {

struct DimPair {
  std::size_t m = 0;
  std::size_t k = 0;  // 0 for unconstrained generators
};

// One named solver entry in a sweep; the label distinguishes several
// configurations of the same algorithm within one table.
struct AlgorithmVariant {
  std::string label;
  SolverConfig config;
};

struct ExperimentSpec {
  std::string name;
  std::string generator = "hp";  // "hp" or "antidiagonal"
  bool pseudo_wrap = false;      // wrap the operator with the scalar field
  std::vector<DimPair> dims;
  std::vector<std::uint64_t> seeds;
  std::vector<AlgorithmVariant> variants;
  std::string output_dir;
  bool write_files = true;
  void validate() const;
};

struct TableRow {
  std::size_t m = 0, k = 0;
  std::uint64_t seed = 0;
  std::string algorithm;  // variant label
  long iter = 0;
  long init = 0;  // cumulative inner line-search evaluations
  double wall_seconds = 0.0;
  bool converged = false;
  std::string termination;
  std::string error;  // non-empty when the run raised instead of finishing
};

struct ComparisonTable {
  std::vector<TableRow> rows;
  // Median over seeds of the iteration count for one cell; NaN if no rows.
  double median_iter(std::size_t m, std::size_t k, const std::string& label) const;
};

// Default solver settings per algorithm: the inertial method with cap 0.1,
// its zero-inertia variant, the backtracking two-projection baseline and the
// inertial two-projection baseline, all stopping at ‖x‖ <= 1e-3.
SolverConfig default_config_for(Algorithm a);

// Runs every (dims x seeds x variants) combination. Instances are generated
// up front; runs execute in parallel (capped by VI_KIT_THREADS) and land in
// a fixed row order, so output is deterministic apart from timing fields.
// When write_files is set, emits under output_dir: instances/*.json,
// histories/<run_id>.csv, table.csv and table.json.
ComparisonTable run_experiment(const ExperimentSpec& spec);

// Counts iterations whose running-minimum gap exceeds budget/n + 1e-8,
// where budget folds the rate constant and the squared start distance.
long check_rate_curve(const std::vector<IterationRecord>& history, double budget);

// Canned sweeps mirroring the two benchmark families.
ExperimentSpec example1_spec(const std::string& output_dir);
ExperimentSpec example2_spec(const std::string& output_dir, bool paper_scale);

// Thread cap for sweeps: VI_KIT_THREADS when set and positive, otherwise
// the OpenMP default (1 without OpenMP).
int sweep_threads();

std::string make_run_id(const ExperimentSpec& spec, const DimPair& d, std::uint64_t seed,
                        const std::string& label);
void write_history_csv(std::ostream& out, const std::string& run_id,
                       const std::string& algorithm,
                       const std::vector<IterationRecord>& history);
void write_table_csv(std::ostream& out, const ComparisonTable& table);

nlohmann::json experiment_to_json(const ExperimentSpec& spec);
ExperimentSpec experiment_from_json(const nlohmann::json& j);
ExperimentSpec load_experiment(const std::string& path);

}  // namespace vikit
