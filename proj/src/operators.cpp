#include "vikit/operators.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "vikit/rng.hpp"

namespace vikit {

const char* to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::monotone: return "monotone";
    case Monotonicity::pseudo_monotone: return "pseudo_monotone";
    default: return "unknown";
  }
}

Monotonicity monotonicity_from_string(const std::string& s) {
  if (s == "monotone") return Monotonicity::monotone;
  if (s == "pseudo_monotone") return Monotonicity::pseudo_monotone;
  if (s == "unknown") return Monotonicity::unknown;
  throw ConfigError("monotonicity: unknown tag '" + s + "'");
}

DenseMatrix AntidiagonalOperator::materialize() const {
  DenseMatrix a(dim, dim);
  for (std::size_t j = 1; j <= dim; ++j) {
    const std::size_t i = dim + 1 - j;  // target row, 1-based
    a(i - 1, j - 1) = (j > i) ? -1.0 : (j < i ? 1.0 : 0.0);
  }
  return a;
}

VIOperator::VIOperator(AffineOperator op, Monotonicity tag)
    : impl_(std::move(op)), tag_(tag) {
  const auto& a = std::get<AffineOperator>(impl_);
  if (a.m.rows() != a.m.cols()) throw DimensionError("AffineOperator: matrix not square");
  if (a.q.size() != a.m.rows()) throw DimensionError("AffineOperator: offset size mismatch");
  if (!all_finite(a.q)) throw DimensionError("AffineOperator: non-finite offset");
}

VIOperator::VIOperator(AntidiagonalOperator op)
    : impl_(op), tag_(Monotonicity::monotone) {
  if (op.dim == 0 || op.dim % 2 != 0) {
    throw DimensionError("AntidiagonalOperator: dimension must be even and positive");
  }
}

VIOperator VIOperator::scaled_of(VIOperator inner) {
  if (inner.monotonicity() != Monotonicity::monotone) {
    throw ConfigError("scaled operator: inner operator must be monotone");
  }
  ScaledOperator s{std::make_shared<const VIOperator>(std::move(inner))};
  return VIOperator(std::variant<AffineOperator, AntidiagonalOperator, ScaledOperator>(
                        std::move(s)),
                    Monotonicity::pseudo_monotone);
}

std::size_t VIOperator::dim() const {
  return std::visit(
      [](const auto& op) -> std::size_t {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, AffineOperator>) return op.m.rows();
        if constexpr (std::is_same_v<T, AntidiagonalOperator>) return op.dim;
        if constexpr (std::is_same_v<T, ScaledOperator>) return op.inner->dim();
      },
      impl_);
}

Vector VIOperator::eval(const Vector& x) const {
  if (x.size() != dim()) {
    throw DimensionError("VIOperator::eval: point size " + std::to_string(x.size()) +
                         " vs operator dimension " + std::to_string(dim()));
  }
  return std::visit(
      [&](const auto& op) -> Vector {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, AffineOperator>) {
          Vector out = matvec(op.m, x);
          for (std::size_t i = 0; i < out.size(); ++i) out[i] += op.q[i];
          return out;
        } else if constexpr (std::is_same_v<T, AntidiagonalOperator>) {
          const std::size_t n = op.dim;
          Vector out(n);
          // Column j holds ±1 in row n+1-j: below the antidiagonal the sign
          // is +1, above it -1 (1-based indexing).
          for (std::size_t j = 1; j <= n; ++j) {
            const std::size_t i = n + 1 - j;
            out[i - 1] = (j > i) ? -x[j - 1] : (j < i ? x[j - 1] : 0.0);
          }
          return out;
        } else {
          Vector out = op.inner->eval(x);
          const double s = 0.1 + std::exp(-norm_sq(x));
          for (double& v : out) v *= s;
          return out;
        }
      },
      impl_);
}

bool VIOperator::has_linear_matrix() const {
  return !std::holds_alternative<ScaledOperator>(impl_);
}

DenseMatrix VIOperator::linear_matrix() const {
  if (const auto* a = std::get_if<AffineOperator>(&impl_)) return a->m;
  if (const auto* r = std::get_if<AntidiagonalOperator>(&impl_)) return r->materialize();
  throw ConfigError("linear_matrix: operator has no explicit linear part");
}

void validate_problem(const VIProblem& p) {
  if (p.op.dim() != dim_of(p.set)) {
    throw ConfigError("problem: operator dimension " + std::to_string(p.op.dim()) +
                      " vs set dimension " + std::to_string(dim_of(p.set)));
  }
  if (p.known_solution) {
    const Vector& xs = *p.known_solution;
    if (xs.size() != p.op.dim()) throw ConfigError("problem: known_solution size mismatch");
    if (!all_finite(xs)) throw ConfigError("problem: known_solution not finite");
    const double r = norm(natural_residual(p.set, p.op.eval(xs), xs));
    if (!(r <= 1e-6)) {
      throw ConfigError("problem: known_solution residual " + std::to_string(r) +
                        " exceeds 1e-6");
    }
  }
}

VIProblem make_antidiagonal(std::size_t dim) {
  VIProblem p{VIOperator(AntidiagonalOperator{dim}), WholeSpace{dim},
              Vector(dim, 0.0), "antidiagonal", 0, dim, 0};
  validate_problem(p);
  return p;
}

VIProblem make_hp_instance(std::size_t m, std::size_t k, std::uint64_t seed) {
  if (m == 0 || k == 0) throw ConfigError("hp instance: m and k must be positive");
  Rng rng(seed);
  // Draw order is part of the format: B row-major, R row-major, diagonal D,
  // then G row-major and g. Changing it changes every seeded instance.
  DenseMatrix b(m, m, rng.uniform_vec(m * m, -2.0, 2.0));
  DenseMatrix r(m, m, rng.uniform_vec(m * m, -2.0, 2.0));
  const Vector diag = rng.uniform_vec(m, 0.1, 2.0);
  DenseMatrix mat = mat_mul_abt(b, b);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      mat(i, j) += 0.5 * (r(i, j) - r(j, i));
    }
    mat(i, i) += diag[i];
  }
  DenseMatrix g_mat(k, m, rng.uniform_vec(k * m, -2.0, 2.0));
  Vector g_vec = rng.uniform_vec(k, 0.0, 1.0);

  VIProblem p{VIOperator(AffineOperator{std::move(mat), Vector(m, 0.0)},
                         Monotonicity::monotone),
              Polyhedron(std::move(g_mat), std::move(g_vec)),
              Vector(m, 0.0), "hp", seed, m, k};
  validate_problem(p);
  return p;
}

VIProblem make_pseudomonotone_scaled(const VIProblem& inner) {
  VIProblem p{VIOperator::scaled_of(inner.op), inner.set, inner.known_solution,
              inner.generator + "_scaled", inner.seed, inner.m, inner.k};
  validate_problem(p);
  return p;
}

ProbeReport monotonicity_probe(const VIOperator& f, int n_pairs, double radius,
                               std::uint64_t seed) {
  Rng rng(seed);
  ProbeReport rep;
  rep.pairs = n_pairs;
  double lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_pairs; ++i) {
    const Vector u = rng.in_ball(f.dim(), radius);
    // Alternate far pairs with close ones; close pairs put the premise
    // hyperplane near both points, so the implication test is non-vacuous
    // even for strongly monotone operators.
    const Vector v = (i % 2 == 0) ? rng.in_ball(f.dim(), radius)
                                  : add(u, rng.in_ball(f.dim(), radius / 8.0));
    const Vector fu = f.eval(u);
    const Vector fv = f.eval(v);
    const Vector d = sub(v, u);
    lo = std::min(lo, -dot(sub(fu, fv), d));
    // Implication test in both orders: <F(u), v-u> >= 0 must force
    // <F(v), v-u> >= 0 for a pseudo-monotone operator.
    if (dot(fu, d) >= 0.0) {
      ++rep.premise_pairs;
      if (dot(fv, d) < -1e-10) ++rep.pseudo_violations;
    }
    if (dot(fv, scaled(d, -1.0)) >= 0.0) {
      ++rep.premise_pairs;
      if (dot(fu, scaled(d, -1.0)) < -1e-10) ++rep.pseudo_violations;
    }
  }
  rep.min_pairing = n_pairs > 0 ? lo : 0.0;
  return rep;
}

}  // namespace vikit
