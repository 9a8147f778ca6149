#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "vikit/numerics.hpp"

namespace vikit {

// All of ℝ^dim.
struct WholeSpace {
  std::size_t dim = 0;
};

// {x : <a, x> <= c} with a != 0.
struct HalfSpace {
  Vector a;
  double c = 0.0;
  HalfSpace(Vector a_, double c_);
};

// {x : A x = b} with A full row rank; the Gram factor of A Aᵀ is cached.
class AffineSet {
 public:
  AffineSet(DenseMatrix a, Vector b);
  const DenseMatrix& a() const { return a_; }
  const Vector& b() const { return b_; }
  std::size_t dim() const { return a_.cols(); }
  Vector project(const Vector& x) const;

 private:
  DenseMatrix a_;
  Vector b_;
  DenseMatrix gram_chol_;
};

// {x : lo <= x <= hi} componentwise; ±inf entries mean unbounded sides.
struct Box {
  Vector lo, hi;
  Box(Vector lo_, Vector hi_);
};

// {x : G x <= g}. Construction verifies the set is nonempty.
class Polyhedron {
 public:
  Polyhedron(DenseMatrix g_mat, Vector g_vec);
  const DenseMatrix& g_mat() const { return g_mat_; }
  const Vector& g_vec() const { return g_vec_; }
  std::size_t dim() const { return g_mat_.cols(); }

 private:
  DenseMatrix g_mat_;
  Vector g_vec_;
};

using FeasibleSet = std::variant<WholeSpace, HalfSpace, AffineSet, Box, Polyhedron>;

struct ProjectionResult {
  Vector point;
  // Indices of constraints active at the solution (polyhedra only).
  std::vector<std::size_t> active_set;
  // Achieved feasibility/optimality residual of the projection subproblem.
  double kkt_residual = 0.0;
};

std::size_t dim_of(const FeasibleSet& c);
bool contains(const FeasibleSet& c, const Vector& x, double tol);
ProjectionResult project(const FeasibleSet& c, const Vector& x);

// Closed-form projection onto {y : <a, y> <= c}.
Vector project_halfspace(const Vector& a, double c, const Vector& x);

// Projection onto {y : G y <= g} by a primal active-set method on the dual
// nonnegative least-squares problem. Throws ProjectionError if the iteration
// cap is hit or a working-set system is irreparably singular; an unbounded
// multiplier is reported as infeasibility.
ProjectionResult project_polyhedron(const DenseMatrix& g_mat, const Vector& g_vec,
                                    const Vector& x, double tol = 1e-10);

// x - P_C(x - f_at_x), the natural-map residual used by the solvers.
Vector natural_residual(const FeasibleSet& c, const Vector& f_at_x, const Vector& x);

}  // namespace vikit
