#pragma once

// Dense real vectors and matrices sized for streaming-PCA experiments
// (dimension up to a few hundred). Storage is row-major and owned by value.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace streampca {

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim, double value = 0.0);
  explicit Vector(std::vector<double> entries);
  Vector(std::initializer_list<double> entries);

  /// Standard basis vector e_index.
  static Vector unit(std::size_t dim, std::size_t index);

  std::size_t dim() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  double operator[](std::size_t i) const { return entries_[i]; }
  double& operator[](std::size_t i) { return entries_[i]; }

  std::span<const double> values() const noexcept { return entries_; }
  std::span<double> values() noexcept { return entries_; }
  const double* data() const noexcept { return entries_.data(); }
  double* data() noexcept { return entries_.data(); }

  bool operator==(const Vector&) const = default;

 private:
  std::vector<double> entries_;
};

double dot(const Vector& a, const Vector& b);
double norm(const Vector& a);
/// a / ||a||; throws std::invalid_argument on a zero vector.
Vector normalized(const Vector& a);
/// y += alpha * x
void axpy(double alpha, const Vector& x, Vector& y);
Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(double s, const Vector& a);

/// General dense matrix. Products of covariance-type factors are not
/// symmetric, so they live here rather than in SymMatrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t dim);
  static Matrix outer(const Vector& a, const Vector& b);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }

  const double* data() const noexcept { return entries_.data(); }
  double* data() noexcept { return entries_.data(); }

  Vector column(std::size_t j) const;
  Matrix transpose() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, const Vector& x);
Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);

/// a^T x without forming the transpose.
Vector transpose_times(const Matrix& a, const Vector& x);
double frobenius_norm(const Matrix& a);
/// trace(a^T b), the Frobenius inner product.
double frobenius_inner(const Matrix& a, const Matrix& b);

/// Square matrix with exact symmetry. Construction from arbitrary data
/// averages (i,j) and (j,i); afterwards the storage is read-only.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m);
  SymMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static SymMatrix zero(std::size_t dim);
  static SymMatrix identity(std::size_t dim);
  static SymMatrix diagonal(std::span<const double> diag);
  static SymMatrix diagonal(std::initializer_list<double> diag);
  /// scale * x x^T
  static SymMatrix outer(const Vector& x, double scale = 1.0);

  std::size_t dim() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix& matrix() const noexcept { return m_; }

  bool operator==(const SymMatrix&) const = default;

 private:
  Matrix m_;
};

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator*(double s, const SymMatrix& a);
Vector operator*(const SymMatrix& a, const Vector& x);

/// basis * inner * basis^T for a (d x k) basis and k x k inner matrix.
SymMatrix conjugate(const Matrix& basis, const SymMatrix& inner);
/// basis^T * a * basis, the restriction of a to the column span of basis.
SymMatrix restrict_to(const SymMatrix& a, const Matrix& basis);

double frobenius_norm(const SymMatrix& a);
double trace(const SymMatrix& a);
/// Largest absolute eigenvalue.
double operator_norm(const SymMatrix& a);

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // descending
  Matrix eigenvectors;              // column k pairs with eigenvalues[k]

  std::size_t dim() const noexcept { return eigenvalues.size(); }
  Vector eigenvector(std::size_t k) const { return eigenvectors.column(k); }
  /// Q diag(values) Q^T
  SymMatrix reconstruct() const;
};

struct EighOptions {
  /// Stop once the off-diagonal Frobenius mass is below tolerance * ||A||_F.
  double tolerance = 1e-12;
  int max_sweeps = 100;
};

/// Cyclic Jacobi eigensolver. Eigenvalues are sorted descending; each
/// eigenvector is flipped so its largest-magnitude entry (lowest index on
/// ties) is nonnegative. Throws ConvergenceError when the sweep budget is
/// exhausted.
EigenDecomposition eigh(const SymMatrix& a, const EighOptions& options = {});

/// Symmetric PSD square root. Eigenvalues in [-1e-10 ||a||, 0) are clamped to
/// zero; anything more negative raises NotPsdError.
SymMatrix sqrt_psd(const SymMatrix& a);

}  // namespace streampca
