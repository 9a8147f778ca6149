#pragma once

#include <cstddef>
#include <vector>

#include "vikit/errors.hpp"

namespace vikit {

using Vector = std::vector<double>;

bool all_finite(const Vector& v);

// Dense row-major matrix. Entries are checked finite on construction;
// arithmetic helpers assume finite inputs and leave overflow detection
// to their callers (the solver loop guards against blow-up explicitly).
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  Vector row(std::size_t i) const;
  DenseMatrix transposed() const;
  double max_abs() const;

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

double dot(const Vector& a, const Vector& b);
double norm_sq(const Vector& a);
double norm(const Vector& a);
double inf_norm(const Vector& a);

Vector add(const Vector& a, const Vector& b);
Vector sub(const Vector& a, const Vector& b);
Vector scaled(const Vector& a, double s);
// a + s * b
Vector add_scaled(const Vector& a, double s, const Vector& b);

// Low-level kernels. The OpenMP variants partition output rows across
// threads, so every entry is produced by exactly one thread with the same
// summation order as the serial code: results are bit-identical.
namespace kernels {

void matvec_serial(const DenseMatrix& m, const Vector& x, Vector& out);
void matvec_omp(const DenseMatrix& m, const Vector& x, Vector& out);
void mat_mul_abt_serial(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);
void mat_mul_abt_omp(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);

// Work size (multiply-add count) above which the dispatching wrappers
// switch to the OpenMP kernels.
inline constexpr std::size_t parallel_threshold = 1u << 15;

}  // namespace kernels

Vector matvec(const DenseMatrix& m, const Vector& x);
// Mᵀ x without forming the transpose.
Vector tmatvec(const DenseMatrix& m, const Vector& x);
// A Bᵀ, used for Gram matrices.
DenseMatrix mat_mul_abt(const DenseMatrix& a, const DenseMatrix& b);

// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
// Pivots below pivot_floor raise ProjectionError.
DenseMatrix cholesky(const DenseMatrix& spd, double pivot_floor = 1e-12);
// Solves L Lᵀ x = rhs given the lower factor L.
Vector chol_solve(const DenseMatrix& lower, const Vector& rhs);

// Largest singular value via power iteration on MᵀM. Deterministic: starts
// from the all-ones vector and restarts once from a fixed perturbed start if
// the first pass stalls. Throws SpectralNormError if both passes stall.
double spectral_norm(const DenseMatrix& m, double tol = 1e-10, int max_iter = 20000);

}  // namespace vikit
