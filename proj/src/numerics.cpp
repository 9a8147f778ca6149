#include "vikit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "vikit/rng.hpp"

namespace vikit {

namespace {

void require_same_size(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(what) + ": size mismatch " +
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
}

void require_finite_data(const std::vector<double>& d, const char* what) {
  for (double v : d) {
    if (!std::isfinite(v)) throw DimensionError(std::string(what) + ": non-finite entry");
  }
}

}  // namespace

bool all_finite(const Vector& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (!std::isfinite(fill)) throw DimensionError("DenseMatrix: non-finite fill");
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw DimensionError("DenseMatrix: data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  require_finite_data(data_, "DenseMatrix");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector DenseMatrix::row(std::size_t i) const {
  return Vector(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double dot(const Vector& a, const Vector& b) {
  require_same_size(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm_sq(const Vector& a) { return dot(a, a); }

double norm(const Vector& a) { return std::sqrt(norm_sq(a)); }

double inf_norm(const Vector& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

Vector add(const Vector& a, const Vector& b) {
  require_same_size(a, b, "add");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vector sub(const Vector& a, const Vector& b) {
  require_same_size(a, b, "sub");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Vector scaled(const Vector& a, double s) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * s;
  return out;
}

Vector add_scaled(const Vector& a, double s, const Vector& b) {
  require_same_size(a, b, "add_scaled");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + s * b[i];
  return out;
}

namespace kernels {

void matvec_serial(const DenseMatrix& m, const Vector& x, Vector& out) {
  const std::size_t rows = m.rows(), cols = m.cols();
  out.assign(rows, 0.0);
  const double* md = m.data().data();
  for (std::size_t i = 0; i < rows; ++i) {
    const double* mrow = md + i * cols;
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += mrow[j] * x[j];
    out[i] = s;
  }
}

void matvec_omp(const DenseMatrix& m, const Vector& x, Vector& out) {
  const std::size_t rows = m.rows(), cols = m.cols();
  out.assign(rows, 0.0);
  const double* md = m.data().data();
  const double* xd = x.data();
  double* od = out.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rows); ++i) {
    const double* mrow = md + static_cast<std::size_t>(i) * cols;
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += mrow[j] * xd[j];
    od[i] = s;
  }
}

void mat_mul_abt_serial(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
  const std::size_t rows = a.rows(), inner = a.cols(), cols = b.rows();
  out = DenseMatrix(rows, cols);
  const double* ad = a.data().data();
  const double* bd = b.data().data();
  for (std::size_t i = 0; i < rows; ++i) {
    const double* arow = ad + i * inner;
    for (std::size_t j = 0; j < cols; ++j) {
      const double* brow = bd + j * inner;
      double s = 0.0;
      for (std::size_t t = 0; t < inner; ++t) s += arow[t] * brow[t];
      out(i, j) = s;
    }
  }
}

void mat_mul_abt_omp(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
  const std::size_t rows = a.rows(), inner = a.cols(), cols = b.rows();
  out = DenseMatrix(rows, cols);
  const double* ad = a.data().data();
  const double* bd = b.data().data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rows); ++i) {
    const double* arow = ad + static_cast<std::size_t>(i) * inner;
    for (std::size_t j = 0; j < cols; ++j) {
      const double* brow = bd + j * inner;
      double s = 0.0;
      for (std::size_t t = 0; t < inner; ++t) s += arow[t] * brow[t];
      out(static_cast<std::size_t>(i), j) = s;
    }
  }
}

}  // namespace kernels

Vector matvec(const DenseMatrix& m, const Vector& x) {
  if (m.cols() != x.size()) {
    throw DimensionError("matvec: matrix cols " + std::to_string(m.cols()) +
                         " vs vector size " + std::to_string(x.size()));
  }
  Vector out;
  if (m.rows() * m.cols() >= kernels::parallel_threshold) {
    kernels::matvec_omp(m, x, out);
  } else {
    kernels::matvec_serial(m, x, out);
  }
  return out;
}

Vector tmatvec(const DenseMatrix& m, const Vector& x) {
  if (m.rows() != x.size()) {
    throw DimensionError("tmatvec: matrix rows " + std::to_string(m.rows()) +
                         " vs vector size " + std::to_string(x.size()));
  }
  Vector out(m.cols(), 0.0);
  const double* md = m.data().data();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* mrow = md + i * m.cols();
    const double xi = x[i];
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += xi * mrow[j];
  }
  return out;
}

DenseMatrix mat_mul_abt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols()) {
    throw DimensionError("mat_mul_abt: inner dims " + std::to_string(a.cols()) +
                         " vs " + std::to_string(b.cols()));
  }
  DenseMatrix out;
  if (a.rows() * a.cols() * b.rows() >= kernels::parallel_threshold) {
    kernels::mat_mul_abt_omp(a, b, out);
  } else {
    kernels::mat_mul_abt_serial(a, b, out);
  }
  return out;
}

DenseMatrix cholesky(const DenseMatrix& spd, double pivot_floor) {
  if (spd.rows() != spd.cols()) throw DimensionError("cholesky: matrix not square");
  const std::size_t n = spd.rows();
  DenseMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = spd(j, j);
    for (std::size_t t = 0; t < j; ++t) d -= l(j, t) * l(j, t);
    if (!(d > pivot_floor)) {
      throw ProjectionError("cholesky: pivot " + std::to_string(d) + " at column " +
                            std::to_string(j) + " below floor");
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = spd(i, j);
      for (std::size_t t = 0; t < j; ++t) s -= l(i, t) * l(j, t);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

Vector chol_solve(const DenseMatrix& lower, const Vector& rhs) {
  const std::size_t n = lower.rows();
  if (rhs.size() != n) throw DimensionError("chol_solve: rhs size mismatch");
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = rhs[i];
    for (std::size_t t = 0; t < i; ++t) s -= lower(i, t) * y[t];
    y[i] = s / lower(i, i);
  }
  Vector x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t t = ii + 1; t < n; ++t) s -= lower(t, ii) * x[t];
    x[ii] = s / lower(ii, ii);
  }
  return x;
}

namespace {

// One power-iteration pass on MᵀM from the given start; returns the last
// Rayleigh estimate and whether successive estimates settled within tol.
std::pair<double, bool> power_pass(const DenseMatrix& m, Vector v, double tol, int max_iter) {
  const double nv = norm(v);
  if (nv == 0.0) return {0.0, false};
  v = scaled(v, 1.0 / nv);
  double est = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector u = tmatvec(m, matvec(m, v));
    const double nu = norm(u);
    if (nu == 0.0) return {0.0, false};  // start fell inside the null space
    const double next = std::sqrt(nu);  // ‖MᵀM v‖ → σ² for unit v
    v = scaled(u, 1.0 / nu);
    if (it > 0 && std::abs(next - est) <= tol * std::max(1.0, next)) return {next, true};
    est = next;
  }
  return {est, false};
}

}  // namespace

double spectral_norm(const DenseMatrix& m, double tol, int max_iter) {
  if (m.rows() == 0 || m.cols() == 0 || m.max_abs() == 0.0) return 0.0;
  Vector ones(m.cols(), 1.0);
  auto [est, ok] = power_pass(m, ones, tol, max_iter);
  if (ok && est > 0.0) return est;

  // The all-ones start can be orthogonal to the leading singular vector
  // (or inside the null space); retry from a fixed skewed start.
  Vector skew(m.cols());
  for (std::size_t i = 0; i < skew.size(); ++i) {
    skew[i] = 1.0 + 0.127 * static_cast<double>(i % 17) + 1e-3 * static_cast<double>(i);
  }
  auto [est2, ok2] = power_pass(m, skew, tol, max_iter);
  if (ok2) return std::max(est, est2);
  throw SpectralNormError("spectral_norm: power iteration did not settle",
                          std::max(est, est2));
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // u1 shifted into (0, 1] so the log is finite.
  const double u1 = 1.0 - u01();
  const double u2 = u01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

Vector Rng::uniform_vec(std::size_t n, double lo, double hi) {
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = uniform(lo, hi);
  return out;
}

Vector Rng::in_ball(std::size_t dim, double radius) {
  Vector dir(dim);
  double n2 = 0.0;
  do {
    for (std::size_t i = 0; i < dim; ++i) dir[i] = normal();
    n2 = norm_sq(dir);
  } while (n2 == 0.0);
  const double r = radius * std::pow(u01(), 1.0 / static_cast<double>(dim));
  return scaled(dir, r / std::sqrt(n2));
}

}  // namespace vikit
