#include "vikit/feasible_sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace vikit {

namespace {

constexpr double kMultiplierBound = 1e12;

void require_dim(const FeasibleSet& c, const Vector& x, const char* what) {
  if (dim_of(c) != x.size()) {
    throw DimensionError(std::string(what) + ": point size " + std::to_string(x.size()) +
                         " vs set dimension " + std::to_string(dim_of(c)));
  }
}

bool has_full_row_rank(DenseMatrix a, double tol) {
  const std::size_t rows = a.rows(), cols = a.cols();
  if (rows == 0 || rows > cols) return false;
  const double scale = std::max(1.0, a.max_abs());
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t piv = rank;
    double best = std::abs(a(rank, col));
    for (std::size_t i = rank + 1; i < rows; ++i) {
      if (std::abs(a(i, col)) > best) {
        best = std::abs(a(i, col));
        piv = i;
      }
    }
    if (best <= tol * scale) continue;
    if (piv != rank) {
      for (std::size_t j = 0; j < cols; ++j) std::swap(a(piv, j), a(rank, j));
    }
    for (std::size_t i = rank + 1; i < rows; ++i) {
      const double f = a(i, col) / a(rank, col);
      for (std::size_t j = col; j < cols; ++j) a(i, j) -= f * a(rank, j);
    }
    ++rank;
  }
  return rank == rows;
}

}  // namespace

HalfSpace::HalfSpace(Vector a_, double c_) : a(std::move(a_)), c(c_) {
  if (!all_finite(a) || !std::isfinite(c)) throw DimensionError("HalfSpace: non-finite data");
  if (norm_sq(a) == 0.0) throw DimensionError("HalfSpace: zero normal");
}

AffineSet::AffineSet(DenseMatrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() == 0) throw DimensionError("AffineSet: no equations");
  if (b_.size() != a_.rows()) throw DimensionError("AffineSet: rhs size mismatch");
  if (!all_finite(b_)) throw DimensionError("AffineSet: non-finite rhs");
  if (!has_full_row_rank(a_, 1e-10)) {
    throw DimensionError("AffineSet: equation matrix is row rank deficient");
  }
  gram_chol_ = cholesky(mat_mul_abt(a_, a_));
}

Vector AffineSet::project(const Vector& x) const {
  const Vector resid = sub(matvec(a_, x), b_);
  const Vector mult = chol_solve(gram_chol_, resid);
  return sub(x, tmatvec(a_, mult));
}

Box::Box(Vector lo_, Vector hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size()) throw DimensionError("Box: bound size mismatch");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (std::isnan(lo[i]) || std::isnan(hi[i]) ||
        lo[i] == std::numeric_limits<double>::infinity() ||
        hi[i] == -std::numeric_limits<double>::infinity() || lo[i] > hi[i]) {
      throw DimensionError("Box: invalid bounds at index " + std::to_string(i));
    }
  }
}

Polyhedron::Polyhedron(DenseMatrix g_mat, Vector g_vec)
    : g_mat_(std::move(g_mat)), g_vec_(std::move(g_vec)) {
  if (g_vec_.size() != g_mat_.rows()) throw DimensionError("Polyhedron: rhs size mismatch");
  if (!all_finite(g_vec_)) throw DimensionError("Polyhedron: non-finite rhs");
  if (g_mat_.cols() == 0) throw DimensionError("Polyhedron: zero-dimensional space");
  const bool origin_inside =
      std::all_of(g_vec_.begin(), g_vec_.end(), [](double v) { return v >= 0.0; });
  if (!origin_inside) {
    try {
      project_polyhedron(g_mat_, g_vec_, Vector(g_mat_.cols(), 0.0));
    } catch (const ProjectionError& e) {
      throw ProjectionError(std::string("Polyhedron: empty or degenerate feasible set (") +
                            e.what() + ")");
    }
  }
}

std::size_t dim_of(const FeasibleSet& c) {
  return std::visit(
      [](const auto& s) -> std::size_t {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, WholeSpace>) return s.dim;
        if constexpr (std::is_same_v<T, HalfSpace>) return s.a.size();
        if constexpr (std::is_same_v<T, AffineSet>) return s.dim();
        if constexpr (std::is_same_v<T, Box>) return s.lo.size();
        if constexpr (std::is_same_v<T, Polyhedron>) return s.dim();
      },
      c);
}

bool contains(const FeasibleSet& c, const Vector& x, double tol) {
  require_dim(c, x, "contains");
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, WholeSpace>) {
          return true;
        } else if constexpr (std::is_same_v<T, HalfSpace>) {
          return dot(s.a, x) <= s.c + tol;
        } else if constexpr (std::is_same_v<T, AffineSet>) {
          return inf_norm(sub(matvec(s.a(), x), s.b())) <= tol;
        } else if constexpr (std::is_same_v<T, Box>) {
          for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] < s.lo[i] - tol || x[i] > s.hi[i] + tol) return false;
          }
          return true;
        } else {
          const Vector v = sub(matvec(s.g_mat(), x), s.g_vec());
          return std::all_of(v.begin(), v.end(), [&](double t) { return t <= tol; });
        }
      },
      c);
}

Vector project_halfspace(const Vector& a, double c, const Vector& x) {
  const double viol = dot(a, x) - c;
  if (viol <= 0.0) return x;
  return add_scaled(x, -viol / norm_sq(a), a);
}

ProjectionResult project_polyhedron(const DenseMatrix& g_mat, const Vector& g_vec,
                                    const Vector& x, double tol) {
  const std::size_t k = g_mat.rows(), m = g_mat.cols();
  if (g_vec.size() != k) throw DimensionError("project_polyhedron: rhs size mismatch");
  if (x.size() != m) throw DimensionError("project_polyhedron: point size mismatch");
  if (k == 0) return {x, {}, 0.0};

  const DenseMatrix q = mat_mul_abt(g_mat, g_mat);
  Vector d(k);
  {
    const Vector gx = matvec(g_mat, x);
    for (std::size_t i = 0; i < k; ++i) d[i] = gx[i] - g_vec[i];
  }
  const double stat_tol = tol * std::max(1.0, inf_norm(d));

  Vector lambda(k, 0.0);
  std::vector<std::size_t> work;  // indices with lambda free (working set)
  std::vector<char> in_work(k, 0);

  const auto primal_point = [&](const Vector& lam) {
    Vector y = x;
    for (std::size_t i : work) {
      if (lam[i] != 0.0) {
        for (std::size_t j = 0; j < m; ++j) y[j] -= lam[i] * g_mat(i, j);
      }
    }
    return y;
  };

  const auto solve_working = [&]() -> Vector {
    const std::size_t w = work.size();
    DenseMatrix qw(w, w);
    Vector dw(w);
    for (std::size_t i = 0; i < w; ++i) {
      dw[i] = d[work[i]];
      for (std::size_t j = 0; j < w; ++j) qw(i, j) = q(work[i], work[j]);
    }
    try {
      return chol_solve(cholesky(qw), dw);
    } catch (const ProjectionError&) {
      // Near-duplicate rows make the working Gram singular; a small ridge
      // keeps the step well defined without visibly moving the solution.
      for (std::size_t i = 0; i < w; ++i) qw(i, i) += 1e-10;
      return chol_solve(cholesky(qw, 1e-13), dw);
    }
  };

  const long max_outer = 100 * static_cast<long>(k) + 200;
  for (long outer = 0; outer < max_outer; ++outer) {
    const Vector y = primal_point(lambda);
    // Dual gradient: G y - g. Positive entries are violated constraints.
    const Vector grad = sub(matvec(g_mat, y), g_vec);
    std::size_t enter = k;
    double worst = stat_tol;
    for (std::size_t i = 0; i < k; ++i) {
      if (!in_work[i] && grad[i] > worst) {
        worst = grad[i];
        enter = i;
      }
    }
    if (enter == k) {
      // No candidate left. For a feasible set this is optimality; an empty
      // set shows up as a macroscopic residual violation here (the dual is
      // unbounded, but the ridge fallback keeps the multipliers finite).
      double viol = 0.0, kkt = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        viol = std::max(viol, grad[i]);
        kkt = std::max(kkt, std::max(0.0, grad[i]));
        kkt = std::max(kkt, std::abs(lambda[i] * grad[i]));
      }
      if (viol > 1e-6 * std::max(1.0, inf_norm(d))) {
        throw ProjectionError(
            "project_polyhedron: terminal constraint violation " + std::to_string(viol) +
            ", set looks infeasible");
      }
      std::sort(work.begin(), work.end());
      return {y, work, kkt};
    }
    work.push_back(enter);
    in_work[enter] = 1;

    // Inner loop: keep the working multipliers strictly positive.
    for (std::size_t guard = 0; guard <= k; ++guard) {
      const Vector mu_w = solve_working();
      bool all_pos = true;
      for (double v : mu_w) {
        if (v <= 0.0) {
          all_pos = false;
          break;
        }
      }
      if (all_pos) {
        for (std::size_t i = 0; i < work.size(); ++i) lambda[work[i]] = mu_w[i];
        break;
      }
      double theta = 1.0;
      for (std::size_t i = 0; i < work.size(); ++i) {
        if (mu_w[i] <= 0.0) {
          const double li = lambda[work[i]];
          const double t = li / (li - mu_w[i]);
          theta = std::min(theta, t);
        }
      }
      const double drop_tol = 1e-12 * std::max(1.0, inf_norm(lambda));
      std::vector<std::size_t> kept;
      for (std::size_t i = 0; i < work.size(); ++i) {
        const std::size_t idx = work[i];
        const double next = lambda[idx] + theta * (mu_w[i] - lambda[idx]);
        if (next <= drop_tol) {
          lambda[idx] = 0.0;
          in_work[idx] = 0;
        } else {
          lambda[idx] = next;
          kept.push_back(idx);
        }
      }
      work = std::move(kept);
      if (work.empty()) break;
    }
    // Optimal multipliers scale linearly with the offset d, so the runaway
    // test must be relative or far feasible queries would trip it.
    if (inf_norm(lambda) > kMultiplierBound * std::max(1.0, inf_norm(d))) {
      throw ProjectionError("project_polyhedron: multipliers unbounded, set looks infeasible");
    }
  }
  throw ProjectionError("project_polyhedron: iteration cap reached");
}

ProjectionResult project(const FeasibleSet& c, const Vector& x) {
  require_dim(c, x, "project");
  return std::visit(
      [&](const auto& s) -> ProjectionResult {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, WholeSpace>) {
          return {x, {}, 0.0};
        } else if constexpr (std::is_same_v<T, HalfSpace>) {
          return {project_halfspace(s.a, s.c, x), {}, 0.0};
        } else if constexpr (std::is_same_v<T, AffineSet>) {
          Vector y = s.project(x);
          const double kkt = inf_norm(sub(matvec(s.a(), y), s.b()));
          return {std::move(y), {}, kkt};
        } else if constexpr (std::is_same_v<T, Box>) {
          Vector y(x.size());
          for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::clamp(x[i], s.lo[i], s.hi[i]);
          return {std::move(y), {}, 0.0};
        } else {
          return project_polyhedron(s.g_mat(), s.g_vec(), x);
        }
      },
      c);
}

Vector natural_residual(const FeasibleSet& c, const Vector& f_at_x, const Vector& x) {
  return sub(x, project(c, sub(x, f_at_x)).point);
}

}  // namespace vikit
