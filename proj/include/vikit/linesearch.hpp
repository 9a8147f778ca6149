#pragma once

#include "vikit/numerics.hpp"
#include "vikit/operators.hpp"

namespace vikit {

struct LineSearchOutcome {
  double eta = 1.0;  // accepted step, gamma^m
  int m = 0;         // backtrack count
  Vector y;          // w - eta * r
  Vector f_y;        // operator value at the accepted y, reusable by callers
  int f_evals = 0;   // operator evaluations spent, m + 1
};

// Backtracking search along the residual direction: returns the smallest
// m >= 0 such that <F(w - gamma^m r), r> >= (sigma/2)‖r‖². Throws
// LineSearchError once max_backtracks trial steps have been rejected.
LineSearchOutcome armijo(const VIOperator& f, const Vector& w, const Vector& r,
                         double gamma, double sigma, int max_backtracks = 80);

}  // namespace vikit
