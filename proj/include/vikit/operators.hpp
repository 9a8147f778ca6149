#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "vikit/feasible_sets.hpp"
#include "vikit/numerics.hpp"

namespace vikit {

enum class Monotonicity { monotone, pseudo_monotone, unknown };

const char* to_string(Monotonicity m);
Monotonicity monotonicity_from_string(const std::string& s);

// F(x) = M x + q.
struct AffineOperator {
  DenseMatrix m;
  Vector q;
};

// F(x) = A x for the skew rotation-like matrix with a_ij = -1 when
// j = dim+1-i and j > i, a_ij = +1 when j < i on the antidiagonal, 0 elsewhere
// (1-based indices). A maps e_j to ±e_{dim+1-j}, so evaluation is O(dim).
struct AntidiagonalOperator {
  std::size_t dim = 0;
  DenseMatrix materialize() const;
};

class VIOperator;

// F(x) = (0.1 + exp(-‖x‖²)) · inner(x). Keeps pseudo-monotonicity when the
// inner operator is monotone, but is not monotone itself.
struct ScaledOperator {
  std::shared_ptr<const VIOperator> inner;
};

class VIOperator {
 public:
  VIOperator(AffineOperator op, Monotonicity tag);
  explicit VIOperator(AntidiagonalOperator op);
  static VIOperator scaled_of(VIOperator inner);

  std::size_t dim() const;
  Monotonicity monotonicity() const { return tag_; }
  Vector eval(const Vector& x) const;

  // True for operators with an explicit linear part whose norm bounds the
  // Lipschitz constant (affine and antidiagonal).
  bool has_linear_matrix() const;
  // Dense copy of that linear part; throws ConfigError otherwise.
  DenseMatrix linear_matrix() const;

  const std::variant<AffineOperator, AntidiagonalOperator, ScaledOperator>& impl() const {
    return impl_;
  }

 private:
  VIOperator(std::variant<AffineOperator, AntidiagonalOperator, ScaledOperator> impl,
             Monotonicity tag)
      : impl_(std::move(impl)), tag_(tag) {}
  std::variant<AffineOperator, AntidiagonalOperator, ScaledOperator> impl_;
  Monotonicity tag_;
};

struct VIProblem {
  VIOperator op;
  FeasibleSet set;
  std::optional<Vector> known_solution;
  std::string generator;  // "antidiagonal", "hp", "hp_scaled", or "" for ad-hoc
  std::uint64_t seed = 0;
  std::size_t m = 0, k = 0;
};

// Checks dimensions and, when a solution is claimed, that its natural-map
// residual is below 1e-6. Throws ConfigError on failure.
void validate_problem(const VIProblem& p);

// Unconstrained rotation-like problem; dim must be even and positive.
// Solution: the origin.
VIProblem make_antidiagonal(std::size_t dim);

// Random monotone affine problem over a polyhedron that contains the origin.
// M = B Bᵀ + S + D with B, the skew part S and the positive diagonal D drawn
// from fixed distributions; constraints G x <= g with g > 0 keep the origin
// strictly inside, so the zero solution is retained.
VIProblem make_hp_instance(std::size_t m, std::size_t k, std::uint64_t seed);

// Wraps the operator of an existing problem with the positive scalar field
// 0.1 + exp(-‖x‖²). Requires a monotone inner operator.
VIProblem make_pseudomonotone_scaled(const VIProblem& inner);

struct ProbeReport {
  double min_pairing = 0.0;   // min of <F(u)-F(v), u-v> over sampled pairs
  int pairs = 0;
  int premise_pairs = 0;      // ordered pairs with <F(u), v-u> >= 0
  int pseudo_violations = 0;  // among those, pairs where <F(v), v-u> < -1e-10
};

// Samples point pairs in a ball. min_pairing < 0 certifies the operator is
// not monotone; pseudo_violations > 0 certifies it is not pseudo-monotone.
ProbeReport monotonicity_probe(const VIOperator& f, int n_pairs, double radius,
                               std::uint64_t seed);

}  // namespace vikit
