#include "vikit/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace vikit {

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::alg1: return "alg1";
    case Algorithm::opm: return "opm";
    case Algorithm::spm_fixed: return "spm_fixed";
    case Algorithm::spm_armijo: return "spm_armijo";
    case Algorithm::ispm: return "ispm";
  }
  return "unknown";
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "alg1") return Algorithm::alg1;
  if (s == "opm") return Algorithm::opm;
  if (s == "spm_fixed") return Algorithm::spm_fixed;
  if (s == "spm_armijo") return Algorithm::spm_armijo;
  if (s == "ispm") return Algorithm::ispm;
  throw ConfigError("algorithm: unknown name '" + s + "'");
}

ParamCheck validate_params(double alpha, double sigma, double delta, double beta) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("validate_params: alpha outside [0,1)");
  if (!(sigma > 0.0 && sigma < 1.0)) throw ConfigError("validate_params: sigma outside (0,1)");
  if (!(delta > 0.0)) throw ConfigError("validate_params: delta must be positive");
  if (!std::isfinite(beta)) throw ConfigError("validate_params: beta not finite");

  ParamCheck out;
  const double ds = delta * sigma;
  out.delta_bound =
      (alpha * (1.0 + alpha) * (alpha + ds) + alpha * ds * (alpha + ds)) / sigma;
  out.beta_bound = ds / (alpha + ds) - alpha * (1.0 + alpha) - alpha * ds;
  out.margin = std::min(delta - out.delta_bound, out.beta_bound - beta);
  out.valid = delta > out.delta_bound && beta > 0.0 && beta < out.beta_bound;
  return out;
}

double rate_constant(double alpha, double beta, double alpha0) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("rate_constant: alpha outside [0,1)");
  if (!(beta > 0.0)) throw ConfigError("rate_constant: beta must be positive");
  if (!(alpha0 >= 0.0 && alpha0 <= alpha)) {
    throw ConfigError("rate_constant: alpha0 outside [0, alpha]");
  }
  const double one_m = 1.0 - alpha;
  return 1.0 + (alpha / one_m + alpha * one_m / beta) * (1.0 + (1.0 - alpha0) / one_m);
}

double ispm_tau(double alpha) {
  const double num = 0.5 - 2.0 * alpha - 0.5 * alpha * alpha;
  const double den = 0.5 - alpha + 0.5 * alpha * alpha;
  return 0.5 * num / den;
}

double AlphaSchedule::at(long n) const {
  if (values.empty()) return cap;
  const std::size_t idx =
      std::min(static_cast<std::size_t>(n), values.size() - 1);
  return values[idx];
}

double AlphaSchedule::first() const { return values.empty() ? cap : values.front(); }

void AlphaSchedule::validate() const {
  if (!(cap >= 0.0 && cap < 1.0)) throw ConfigError("alpha schedule: cap outside [0,1)");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0 && values[i] <= cap)) {
      throw ConfigError("alpha schedule: value " + std::to_string(i) + " outside [0, cap]");
    }
    if (i > 0 && values[i] < values[i - 1]) {
      throw ConfigError("alpha schedule: values must be non-decreasing");
    }
  }
}

void StoppingRule::validate() const {
  if (eps_x_norm && !(*eps_x_norm > 0.0)) throw ConfigError("stopping: eps_x_norm must be positive");
  if (eps_residual && !(*eps_residual > 0.0)) throw ConfigError("stopping: eps_residual must be positive");
  if (max_iter < 1) throw ConfigError("stopping: max_iter must be at least 1");
}

Vector StartPoint::materialize(std::size_t dim) const {
  switch (kind) {
    case Kind::ones: return Vector(dim, 1.0);
    case Kind::e1: {
      Vector v(dim, 0.0);
      if (dim > 0) v[0] = 1.0;
      return v;
    }
    case Kind::explicit_vec:
      if (value.size() != dim) throw ConfigError("start point: explicit vector size mismatch");
      if (!all_finite(value)) throw ConfigError("start point: non-finite entries");
      return value;
  }
  throw ConfigError("start point: bad kind");
}

void SolverConfig::validate(const VIProblem& p) const {
  stopping.validate();
  start.materialize(p.op.dim());
  if (max_backtracks < 1) throw ConfigError("config: max_backtracks must be at least 1");

  switch (algorithm) {
    case Algorithm::alg1:
    case Algorithm::opm: {
      if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("config: gamma outside (0,1)");
      if (!(sigma > 0.0 && sigma < 1.0)) throw ConfigError("config: sigma outside (0,1)");
      alpha.validate();
      if (!(delta > 0.0)) throw ConfigError("config: delta must be positive");
      if (!(beta > 0.0)) throw ConfigError("config: beta must be positive");
      if (!unvalidated) {
        const double cap = algorithm == Algorithm::opm ? 0.0 : alpha.cap;
        const ParamCheck chk = validate_params(cap, sigma, delta, beta);
        if (!chk.valid) {
          std::ostringstream os;
          os << "config: parameter cluster fails the validity check (beta bound "
             << chk.beta_bound << ", margin " << chk.margin
             << "); set unvalidated to run anyway";
          throw ConfigError(os.str());
        }
      }
      break;
    }
    case Algorithm::spm_fixed:
      if (!lambda) throw ConfigError("config: spm_fixed needs lambda");
      if (!(*lambda > 0.0)) throw ConfigError("config: lambda must be positive");
      break;
    case Algorithm::spm_armijo:
      if (!(rho > 0.0)) throw ConfigError("config: rho must be positive");
      if (!(mu > 0.0 && mu < 1.0)) throw ConfigError("config: mu outside (0,1)");
      if (!(sigma_ls > 0.0 && sigma_ls < 1.0)) throw ConfigError("config: sigma_ls outside (0,1)");
      break;
    case Algorithm::ispm: {
      const double bound = std::sqrt(5.0) - 2.0;
      if (!(ispm_alpha >= 0.0 && ispm_alpha < bound)) {
        throw ConfigError("config: ispm_alpha must lie in [0, sqrt(5)-2)");
      }
      if (!p.op.has_linear_matrix()) {
        throw ConfigError("config: ispm needs an operator with an explicit linear part");
      }
      break;
    }
  }
}

long InvariantReport::total() const {
  return linesearch_cert_violations + halfspace_gap_violations + solution_cut_violations +
         distance_decrease_violations + rate_bound_violations;
}

Vector halfspace_update(const Vector& w, const Vector& y, const Vector& f_y) {
  const double fn2 = norm_sq(f_y);
  if (fn2 == 0.0) {
    // The accepted line-search certificate forces F(y) != 0 here.
    throw std::logic_error("halfspace_update: zero operator value");
  }
  const double t = dot(f_y, sub(w, y));
  if (t <= 0.0) return w;
  return add_scaled(w, -t / fn2, f_y);
}

namespace {

bool residual_stops(const SolverConfig& cfg, double rn) {
  return rn == 0.0 || (cfg.stopping.eps_residual && rn <= *cfg.stopping.eps_residual);
}

IterationRecord stop_row(long n, const Vector& x, double rn) {
  return {n, norm(x), rn, 0.0, 0, 0.0, 0};
}

}  // namespace

StepResult alg1_step(const VIProblem& p, const SolverConfig& cfg, const IterateState& st) {
  StepResult sr;
  const double a_n = cfg.algorithm == Algorithm::opm ? 0.0 : cfg.alpha.at(st.n);
  sr.w = add_scaled(st.x, a_n, sub(st.x, st.x_prev));
  const Vector f_w = p.op.eval(sr.w);
  sr.z = project(p.set, sub(sr.w, f_w)).point;
  sr.r = sub(sr.w, sr.z);
  const double rn = norm(sr.r);
  if (residual_stops(cfg, rn)) {
    sr.solved = true;
    sr.record = stop_row(st.n, st.x, rn);
    return sr;
  }
  LineSearchOutcome ls = armijo(p.op, sr.w, sr.r, cfg.gamma, cfg.sigma, cfg.max_backtracks);
  sr.x_next = halfspace_update(sr.w, ls.y, ls.f_y);
  const double gap = norm_sq(sub(sr.x_next, sr.w));
  sr.record = {st.n, norm(sr.x_next), rn, ls.eta, ls.f_evals, gap, 0};
  sr.y = std::move(ls.y);
  sr.f_y = std::move(ls.f_y);
  return sr;
}

StepResult spm_step(const VIProblem& p, const SolverConfig& cfg, const IterateState& st) {
  StepResult sr;
  sr.w = st.x;
  const Vector f_x = p.op.eval(st.x);

  double lam = 0.0;
  int evals = 0;
  if (cfg.algorithm == Algorithm::spm_fixed) {
    lam = *cfg.lambda;
    sr.y = project(p.set, add_scaled(st.x, -lam, f_x)).point;
    const double rn = norm(sub(st.x, sr.y));
    if (residual_stops(cfg, rn)) {
      sr.solved = true;
      sr.record = stop_row(st.n, st.x, rn);
      return sr;
    }
    sr.f_y = p.op.eval(sr.y);
    sr.record.residual_norm = rn;
  } else {
    // Backtrack the trial step until the operator's local variation fits it.
    lam = cfg.rho;
    for (int m = 0;; ++m) {
      sr.y = project(p.set, add_scaled(st.x, -lam, f_x)).point;
      sr.f_y = p.op.eval(sr.y);
      ++evals;
      if (lam * norm(sub(f_x, sr.f_y)) <= cfg.sigma_ls * norm(sub(st.x, sr.y))) break;
      if (m >= cfg.max_backtracks) {
        throw LineSearchError("spm_armijo: no acceptable step within " +
                                  std::to_string(cfg.max_backtracks) + " backtracks",
                              cfg.max_backtracks);
      }
      lam *= cfg.mu;
    }
    const double rn = norm(sub(st.x, sr.y));
    if (residual_stops(cfg, rn)) {
      sr.solved = true;
      sr.record = stop_row(st.n, st.x, rn);
      sr.record.inner_f_evals = evals;
      return sr;
    }
    sr.record.residual_norm = rn;
  }

  // Project x - lam F(y) onto the supporting half-space at y.
  const Vector normal = sub(add_scaled(st.x, -lam, f_x), sr.y);
  const Vector v = add_scaled(st.x, -lam, sr.f_y);
  const double nn = norm_sq(normal);
  sr.x_next = nn == 0.0 ? v : project_halfspace(normal, dot(normal, sr.y), v);
  const double gap = norm_sq(sub(sr.x_next, st.x));
  sr.record.n = st.n;
  sr.record.x_norm = norm(sr.x_next);
  sr.record.eta = lam;
  sr.record.inner_f_evals = evals;
  sr.record.gap = gap;
  return sr;
}

StepResult ispm_step(const VIProblem& p, const SolverConfig& cfg, const IterateState& st,
                     double lambda) {
  StepResult sr;
  sr.w = add_scaled(st.x, cfg.ispm_alpha, sub(st.x, st.x_prev));
  const Vector f_w = p.op.eval(sr.w);
  sr.y = project(p.set, add_scaled(sr.w, -lambda, f_w)).point;
  const double rn = norm(sub(sr.w, sr.y));
  if (residual_stops(cfg, rn)) {
    sr.solved = true;
    sr.record = stop_row(st.n, st.x, rn);
    return sr;
  }
  sr.f_y = p.op.eval(sr.y);
  const Vector normal = sub(add_scaled(sr.w, -lambda, f_w), sr.y);
  const Vector v = add_scaled(sr.w, -lambda, sr.f_y);
  const double nn = norm_sq(normal);
  sr.x_next = nn == 0.0 ? v : project_halfspace(normal, dot(normal, sr.y), v);
  sr.record = {st.n, norm(sr.x_next), rn, lambda, 0, norm_sq(sub(sr.x_next, sr.w)), 0};
  return sr;
}

double ispm_lambda(const VIProblem& p, const SolverConfig& cfg) {
  const double l = spectral_norm(p.op.linear_matrix());
  if (!(l > 0.0)) throw ConfigError("ispm: linear part has zero norm");
  return ispm_tau(cfg.ispm_alpha) / l;
}

namespace {

// Per-iteration verifier for the inertial method's certified inequalities;
// active only when the run carries a known solution.
class InvariantChecker {
 public:
  InvariantChecker(const VIProblem& p, const SolverConfig& cfg, const Vector& x0)
      : x_star_(*p.known_solution), sigma_(cfg.sigma) {
    rep_.enabled = true;
    const double cap = cfg.algorithm == Algorithm::opm ? 0.0 : cfg.alpha.cap;
    const double a0 = cfg.algorithm == Algorithm::opm ? 0.0 : cfg.alpha.first();
    bool params_ok = false;
    if (!cfg.unvalidated) {
      params_ok = validate_params(cap, sigma_, cfg.delta, cfg.beta).valid;
    }
    if (params_ok) {
      rep_.rate_checked = true;
      rate_budget_ = rate_constant(cap, cfg.beta, a0) * norm_sq(sub(x0, x_star_));
    }
  }

  void observe(const StepResult& sr) {
    ++rep_.checked_iterations;
    const long n = sr.record.n;
    const double rn2 = norm_sq(sr.r);
    const double pairing = dot(sr.f_y, sr.r);

    if (pairing < 0.5 * sigma_ * rn2 - 1e-12 * rn2) {
      note(rep_.linesearch_cert_violations, n, "line-search certificate", pairing,
           0.5 * sigma_ * rn2);
    }
    // Cut depth at w: <F(y), w - y> = eta <F(y), r> since y = w - eta r.
    const double cut_at_w = sr.record.eta * pairing;
    const double depth_bound = 0.5 * sigma_ * sr.record.eta * rn2;
    if (cut_at_w < depth_bound - 1e-10) {
      note(rep_.halfspace_gap_violations, n, "half-space cut depth", cut_at_w, depth_bound);
    }
    const double cut_at_star = dot(sr.f_y, sub(x_star_, sr.y));
    if (cut_at_star > 1e-10) {
      note(rep_.solution_cut_violations, n, "solution on wrong side of cut", cut_at_star, 0.0);
    }
    const double d_next = norm_sq(sub(sr.x_next, x_star_));
    const double d_w = norm_sq(sub(sr.w, x_star_));
    if (d_next > d_w - sr.record.gap + 1e-8) {
      note(rep_.distance_decrease_violations, n, "distance decrease", d_next,
           d_w - sr.record.gap);
    }
    if (rep_.rate_checked) {
      min_gap_ = std::min(min_gap_, sr.record.gap);
      const double bound = rate_budget_ / static_cast<double>(n);
      if (min_gap_ > bound + 1e-8) {
        note(rep_.rate_bound_violations, n, "running-min rate bound", min_gap_, bound);
      }
    }
  }

  InvariantReport take() { return std::move(rep_); }

 private:
  void note(long& counter, long n, const char* what, double got, double bound) {
    ++counter;
    if (rep_.samples.size() < 8) {
      std::ostringstream os;
      os << "iter " << n << ": " << what << " (value " << got << ", bound " << bound << ")";
      rep_.samples.push_back(os.str());
    }
  }

  InvariantReport rep_;
  Vector x_star_;
  double sigma_;
  double rate_budget_ = 0.0;
  double min_gap_ = std::numeric_limits<double>::infinity();
};

}  // namespace

RunReport solve(const VIProblem& p, const SolverConfig& cfg) {
  cfg.validate(p);
  RunReport rep;
  rep.algorithm = cfg.algorithm;

  IterateState st;
  st.x = cfg.start.materialize(p.op.dim());
  st.x_prev = st.x;

  double lam_ispm = 0.0;
  if (cfg.algorithm == Algorithm::ispm) lam_ispm = ispm_lambda(p, cfg);

  std::unique_ptr<InvariantChecker> checker;
  const bool inertial_family =
      cfg.algorithm == Algorithm::alg1 || cfg.algorithm == Algorithm::opm;
  if (cfg.check_invariants && inertial_family && p.known_solution) {
    checker = std::make_unique<InvariantChecker>(p, cfg, st.x);
  }

  using clock = std::chrono::steady_clock;
  const auto run_start = clock::now();
  for (long n = 1; n <= cfg.stopping.max_iter; ++n) {
    st.n = n;
    const auto t0 = clock::now();
    StepResult sr;
    switch (cfg.algorithm) {
      case Algorithm::alg1:
      case Algorithm::opm:
        sr = alg1_step(p, cfg, st);
        break;
      case Algorithm::spm_fixed:
      case Algorithm::spm_armijo:
        sr = spm_step(p, cfg, st);
        break;
      case Algorithm::ispm:
        sr = ispm_step(p, cfg, st, lam_ispm);
        break;
    }
    sr.record.elapsed_ns =
        std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - t0).count();

    if (!sr.solved && (!std::isfinite(sr.record.x_norm) || !all_finite(sr.x_next))) {
      // Blow-up: stop without recording the poisoned iterate.
      rep.termination = "diverged";
      break;
    }

    rep.inner_evals += sr.record.inner_f_evals;
    if (cfg.record_history) rep.history.push_back(sr.record);
    rep.iterations = n;

    if (sr.solved) {
      rep.termination = "residual";
      rep.converged = true;
      break;
    }
    if (checker) checker->observe(sr);

    st.x_prev = std::move(st.x);
    st.x = std::move(sr.x_next);

    if (cfg.stopping.eps_x_norm && sr.record.x_norm <= *cfg.stopping.eps_x_norm) {
      rep.termination = "x_norm";
      rep.converged = true;
      break;
    }
  }
  rep.wall_seconds =
      std::chrono::duration<double>(clock::now() - run_start).count();
  if (rep.termination.empty()) rep.termination = "max_iter";
  rep.final_x = std::move(st.x);
  if (checker) rep.invariants = checker->take();
  return rep;
}

}  // namespace vikit
