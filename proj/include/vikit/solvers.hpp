#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vikit/linesearch.hpp"
#include "vikit/operators.hpp"

namespace vikit {

enum class Algorithm { alg1, opm, spm_fixed, spm_armijo, ispm };

const char* to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

// Validity check for the inertial method's parameter cluster (inertia cap
// alpha, line-search sigma, auxiliary delta, slack beta). Both bounds must
// hold strictly; margin is the distance of beta to its bound.
struct ParamCheck {
  bool valid = false;
  double delta_bound = 0.0;  // value the delta inequality compares against
  double beta_bound = 0.0;   // upper bound on beta implied by the other three
  double margin = 0.0;       // beta_bound - beta
};

ParamCheck validate_params(double alpha, double sigma, double delta, double beta);

// Constant in the O(1/n) bound on the running-minimum squared step,
// evaluated at inertia cap alpha, slack beta and first inertia alpha0.
double rate_constant(double alpha, double beta, double alpha0);

// Step-size factor for the inertial two-projection baseline.
double ispm_tau(double alpha);

struct AlphaSchedule {
  double cap = 0.1;            // constant value when values is empty
  std::vector<double> values;  // optional explicit schedule, values[0] = alpha_0
  double at(long n) const;     // inertia used at iteration n >= 1
  double first() const;        // alpha_0
  void validate() const;
};

struct StoppingRule {
  std::optional<double> eps_x_norm;    // stop when ‖x_{n+1}‖ <= eps
  std::optional<double> eps_residual;  // stop when the step residual <= eps
  long max_iter = 100000;
  void validate() const;
};

struct StartPoint {
  enum class Kind { ones, e1, explicit_vec };
  Kind kind = Kind::ones;
  Vector value;  // explicit_vec only
  Vector materialize(std::size_t dim) const;
};

struct SolverConfig {
  Algorithm algorithm = Algorithm::alg1;

  // Inertial projection method (and its zero-inertia variant).
  double gamma = 0.1;
  double sigma = 0.8;
  AlphaSchedule alpha;
  double beta = 0.5;
  double delta = 1.0;
  // Skip the parameter-cluster validity check (still rejects malformed
  // ranges). Runs with this flag never check the rate bound.
  bool unvalidated = false;
  int max_backtracks = 80;

  // Two-projection baselines.
  std::optional<double> lambda;  // fixed step for spm_fixed
  double rho = 0.1;              // initial trial step for spm_armijo
  double mu = 0.2;               // backtrack factor for spm_armijo
  double sigma_ls = 0.8;         // acceptance factor for spm_armijo
  double ispm_alpha = 0.2;       // inertia for ispm, must be < sqrt(5) - 2

  StoppingRule stopping;
  StartPoint start;
  bool record_history = true;
  bool check_invariants = false;

  void validate(const VIProblem& p) const;
};

struct IterationRecord {
  long n = 0;
  double x_norm = 0.0;         // ‖x_{n+1}‖ after the update
  double residual_norm = 0.0;  // ‖w_n - P_C(w_n - F(w_n))‖ (or its x-based analogue)
  double eta = 0.0;            // accepted step (gamma^m, or lambda_n; 0 on a stop row)
  int inner_f_evals = 0;       // line-search operator evaluations this iteration
  double gap = 0.0;            // ‖x_{n+1} - w_n‖²
  long long elapsed_ns = 0;
};

struct InvariantReport {
  bool enabled = false;
  bool rate_checked = false;
  long checked_iterations = 0;
  long linesearch_cert_violations = 0;
  long halfspace_gap_violations = 0;   // per-step lower bound on the cut value
  long solution_cut_violations = 0;    // separating cut must not exclude x*
  long distance_decrease_violations = 0;
  long rate_bound_violations = 0;
  std::vector<std::string> samples;  // first few violation descriptions
  long total() const;
};

struct RunReport {
  Algorithm algorithm = Algorithm::alg1;
  long iterations = 0;
  long inner_evals = 0;
  double wall_seconds = 0.0;
  std::string termination;  // "residual" | "x_norm" | "max_iter" | "diverged"
  bool converged = false;
  Vector final_x;
  std::vector<IterationRecord> history;
  InvariantReport invariants;
};

// Projection of w onto {x : <f_y, x - y> <= 0} in closed form.
Vector halfspace_update(const Vector& w, const Vector& y, const Vector& f_y);

struct IterateState {
  Vector x_prev;
  Vector x;
  long n = 1;
};

// One iteration's full intermediate data, exposed for tests and the
// invariant checker. elapsed_ns in record is stamped by solve().
struct StepResult {
  IterationRecord record;
  bool solved = false;  // the step residual met its stopping rule
  Vector w, z, r, y, f_y;
  Vector x_next;
};

StepResult alg1_step(const VIProblem& p, const SolverConfig& cfg, const IterateState& st);
StepResult spm_step(const VIProblem& p, const SolverConfig& cfg, const IterateState& st);
StepResult ispm_step(const VIProblem& p, const SolverConfig& cfg, const IterateState& st,
                     double lambda);

// Step size tau(alpha)/L for ispm, with L the spectral norm of the linear part.
double ispm_lambda(const VIProblem& p, const SolverConfig& cfg);

RunReport solve(const VIProblem& p, const SolverConfig& cfg);

}  // namespace vikit
