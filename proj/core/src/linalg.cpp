#include "streampca/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "streampca/error.hpp"

namespace streampca {

namespace {

void require_same_dim(const Vector& a, const Vector& b, const char* op) {
  if (a.dim() != b.dim()) {
    throw DimensionError(std::string(op) + ": dimension mismatch (" + std::to_string(a.dim()) +
                         " vs " + std::to_string(b.dim()) + ")");
  }
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch");
  }
}

}  // namespace

// ---------------------------------------------------------------- Vector

Vector::Vector(std::size_t dim, double value) : entries_(dim, value) {
  if (dim == 0) throw DimensionError("Vector: dimension must be positive");
}

Vector::Vector(std::vector<double> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw DimensionError("Vector: dimension must be positive");
}

Vector::Vector(std::initializer_list<double> entries) : entries_(entries) {
  if (entries_.empty()) throw DimensionError("Vector: dimension must be positive");
}

Vector Vector::unit(std::size_t dim, std::size_t index) {
  Vector e(dim);
  e[index] = 1.0;
  return e;
}

double dot(const Vector& a, const Vector& b) {
  require_same_dim(a, b, "dot");
  double s = 0.0;
  const double* x = a.data();
  const double* y = b.data();
  for (std::size_t i = 0; i < a.dim(); ++i) s += x[i] * y[i];
  return s;
}

double norm(const Vector& a) { return std::sqrt(dot(a, a)); }

Vector normalized(const Vector& a) {
  const double len = norm(a);
  if (!(len > 0.0) || !std::isfinite(len)) {
    throw std::invalid_argument("normalized: vector must be nonzero and finite");
  }
  return (1.0 / len) * a;
}

void axpy(double alpha, const Vector& x, Vector& y) {
  require_same_dim(x, y, "axpy");
  const double* xs = x.data();
  double* ys = y.data();
  for (std::size_t i = 0; i < x.dim(); ++i) ys[i] += alpha * xs[i];
}

Vector operator+(const Vector& a, const Vector& b) {
  Vector r = a;
  axpy(1.0, b, r);
  return r;
}

Vector operator-(const Vector& a, const Vector& b) {
  Vector r = a;
  axpy(-1.0, b, r);
  return r;
}

Vector operator*(double s, const Vector& a) {
  Vector r = a;
  for (double& v : r.values()) v *= s;
  return r;
}

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double value)
    : rows_(rows), cols_(cols), entries_(rows * cols, value) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  entries_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("Matrix: ragged initializer");
    entries_.insert(entries_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t dim) {
  Matrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::outer(const Vector& a, const Vector& b) {
  Matrix m(a.dim(), b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < b.dim(); ++j) m(i, j) = a[i] * b[j];
  }
  return m;
}

Vector Matrix::column(std::size_t j) const {
  Vector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "Matrix +=");
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += other.entries_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "Matrix -=");
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] -= other.entries_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : entries_) v *= s;
  return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("Matrix product: inner dimension mismatch");
  Matrix c(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* crow = c.data() + i * n;
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = b.data() + k * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

Vector operator*(const Matrix& a, const Vector& x) {
  if (a.cols() != x.dim()) throw DimensionError("Matrix-vector product: dimension mismatch");
  Vector y(a.rows());
  const double* xs = x.data();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* row = a.data() + i * a.cols();
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += row[j] * xs[j];
    y[i] = s;
  }
  return y;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Vector transpose_times(const Matrix& a, const Vector& x) {
  if (a.rows() != x.dim()) throw DimensionError("transpose_times: dimension mismatch");
  Vector y(a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double xi = x[i];
    const double* row = a.data() + i * a.cols();
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += row[j] * xi;
  }
  return y;
}

double frobenius_norm(const Matrix& a) { return std::sqrt(frobenius_inner(a, a)); }

double frobenius_inner(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "frobenius_inner");
  double s = 0.0;
  const std::size_t count = a.rows() * a.cols();
  for (std::size_t k = 0; k < count; ++k) s += a.data()[k] * b.data()[k];
  return s;
}

// ---------------------------------------------------------------- SymMatrix

SymMatrix::SymMatrix(const Matrix& m) : m_(m) {
  if (m.rows() != m.cols()) throw DimensionError("SymMatrix: matrix must be square");
  if (m.rows() == 0) throw DimensionError("SymMatrix: dimension must be positive");
  const std::size_t d = m.rows();
  for (std::size_t k = 0; k < d * d; ++k) {
    if (!std::isfinite(m.data()[k])) throw std::invalid_argument("SymMatrix: non-finite entry");
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const double avg = 0.5 * (m(i, j) + m(j, i));
      m_(i, j) = avg;
      m_(j, i) = avg;
    }
  }
}

SymMatrix::SymMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : SymMatrix(Matrix(rows)) {}

SymMatrix SymMatrix::zero(std::size_t dim) { return SymMatrix(Matrix(dim, dim)); }

SymMatrix SymMatrix::identity(std::size_t dim) { return SymMatrix(Matrix::identity(dim)); }

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return SymMatrix(m);
}

SymMatrix SymMatrix::diagonal(std::initializer_list<double> diag) {
  return diagonal(std::span<const double>(diag.begin(), diag.size()));
}

SymMatrix SymMatrix::outer(const Vector& x, double scale) {
  Matrix m(x.dim(), x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) {
    for (std::size_t j = 0; j < x.dim(); ++j) m(i, j) = scale * x[i] * x[j];
  }
  return SymMatrix(m);
}

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  return SymMatrix(a.matrix() + b.matrix());
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  return SymMatrix(a.matrix() - b.matrix());
}

SymMatrix operator*(double s, const SymMatrix& a) { return SymMatrix(s * a.matrix()); }

Vector operator*(const SymMatrix& a, const Vector& x) { return a.matrix() * x; }

SymMatrix conjugate(const Matrix& basis, const SymMatrix& inner) {
  if (basis.cols() != inner.dim()) throw DimensionError("conjugate: basis/inner mismatch");
  return SymMatrix(basis * inner.matrix() * basis.transpose());
}

SymMatrix restrict_to(const SymMatrix& a, const Matrix& basis) {
  if (basis.rows() != a.dim()) throw DimensionError("restrict_to: basis/matrix mismatch");
  return SymMatrix(basis.transpose() * a.matrix() * basis);
}

double frobenius_norm(const SymMatrix& a) { return frobenius_norm(a.matrix()); }

double trace(const SymMatrix& a) {
  double t = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) t += a(i, i);
  return t;
}

double operator_norm(const SymMatrix& a) {
  const auto eig = eigh(a);
  return std::max(std::abs(eig.eigenvalues.front()), std::abs(eig.eigenvalues.back()));
}

// ---------------------------------------------------------------- eigh

SymMatrix EigenDecomposition::reconstruct() const {
  const std::size_t d = dim();
  Matrix scaled = eigenvectors;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < d; ++k) scaled(i, k) *= eigenvalues[k];
  }
  return SymMatrix(scaled * eigenvectors.transpose());
}

EigenDecomposition eigh(const SymMatrix& input, const EighOptions& options) {
  const std::size_t n = input.dim();
  Matrix a = input.matrix();
  Matrix v = Matrix::identity(n);

  const double scale = frobenius_norm(a);
  auto off_diagonal = [&] {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) s += a(p, q) * a(p, q);
    }
    return std::sqrt(2.0 * s);
  };

  double off = off_diagonal();
  int sweep = 0;
  while (off > options.tolerance * scale) {
    if (sweep == options.max_sweeps) {
      throw ConvergenceError("eigh: Jacobi sweeps exhausted, off-diagonal residual " +
                                 std::to_string(off),
                             off);
    }
    // Early sweeps only annihilate the larger off-diagonal entries.
    const double threshold = sweep < 3 ? 0.2 * off / static_cast<double>(n * n) : 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0 || std::abs(apq) <= threshold) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = a(p, k) = c * akp - s * akq;
          a(k, q) = a(q, k) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    ++sweep;
    off = off_diagonal();
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.eigenvalues[k] = a(src, src);
    std::size_t pivot = 0;
    for (std::size_t i = 1; i < n; ++i) {
      // Magnitudes within rounding of each other count as a tie.
      if (std::abs(v(i, src)) > std::abs(v(pivot, src)) + 1e-12) pivot = i;
    }
    const double sign = v(pivot, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = sign * v(i, src);
  }
  return out;
}

SymMatrix sqrt_psd(const SymMatrix& a) {
  auto eig = eigh(a);
  const double op = std::max(std::abs(eig.eigenvalues.front()), std::abs(eig.eigenvalues.back()));
  const double floor = -1e-10 * op;
  for (double& lambda : eig.eigenvalues) {
    if (lambda < floor) {
      throw NotPsdError("sqrt_psd: matrix has eigenvalue " + std::to_string(lambda), lambda);
    }
    lambda = std::sqrt(std::max(lambda, 0.0));
  }
  return eig.reconstruct();
}

}  // namespace streampca
