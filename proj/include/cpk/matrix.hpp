#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "cpk/common.hpp"

namespace cpk {

/// Dense complex matrix, row-major. The universal numeric carrier: every
/// construction in this library ultimately produces or consumes one of these.
/// Entries are std::complex<double>, i.e. interleaved (re, im) pairs, and all
/// reductions run in a fixed row-major order so results are bit-stable.
class CMatrix {
 public:
  CMatrix() : rows_(0), cols_(0) {}
  CMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}
  CMatrix(std::size_t rows, std::size_t cols, cvector_t entries);

  static CMatrix identity(std::size_t n);
  static CMatrix zero(std::size_t rows, std::size_t cols) { return CMatrix(rows, cols); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  complex_t& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const complex_t& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const cvector_t& data() const { return data_; }
  cvector_t& data() { return data_; }

  CMatrix adjoint() const;
  CMatrix transpose() const;
  CMatrix conjugate() const;
  complex_t trace() const;

  bool is_finite() const;

  CMatrix& operator+=(const CMatrix& rhs);
  CMatrix& operator-=(const CMatrix& rhs);
  CMatrix& operator*=(complex_t s);

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(CMatrix a, complex_t s) { return a *= s; }
  friend CMatrix operator*(complex_t s, CMatrix a) { return a *= s; }
  friend CMatrix operator*(const CMatrix& a, const CMatrix& b);

 private:
  std::size_t rows_, cols_;
  cvector_t data_;
};

/// Dense complex vector.
class CVector {
 public:
  CVector() = default;
  explicit CVector(std::size_t dim) : data_(dim) {}
  explicit CVector(cvector_t entries) : data_(std::move(entries)) {}

  static CVector basis(std::size_t dim, std::size_t index);

  std::size_t dim() const { return data_.size(); }
  complex_t& operator[](std::size_t i) { return data_[i]; }
  const complex_t& operator[](std::size_t i) const { return data_[i]; }
  const cvector_t& data() const { return data_; }
  cvector_t& data() { return data_; }

  double norm() const;

 private:
  cvector_t data_;
};

CVector operator*(const CMatrix& a, const CVector& x);
complex_t inner(const CVector& a, const CVector& b);  // <a|b>, conjugates a

/// Hermitian eigendecomposition H = sum_k lambda_k u_k u_k^dag, eigenvalues
/// ascending, eigenvectors as orthonormal columns.
struct HermEig {
  std::vector<double> eigenvalues;
  CMatrix eigenvectors;
};

// -- core operations ---------------------------------------------------------

/// Column-stacking vectorization: vec(A)[i + j*rows] = A(i, j).
CVector vectorize(const CMatrix& a);

/// Inverse of vectorize for square targets.
CMatrix unvectorize(const CVector& v, std::size_t rows, std::size_t cols);

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Largest singular value.
double spectral_norm(const CMatrix& a);
double frobenius_norm(const CMatrix& a);

/// Requires ||H - H^dag|| <= tol_herm; throws NotHermitian otherwise.
HermEig herm_eig(const CMatrix& h, double tol_herm = tol::hermitian);

/// Principal square root of a PSD Hermitian matrix, via herm_eig. Eigenvalues
/// in [-tol, 0) are clamped to zero; anything below -tol throws.
CMatrix psd_sqrt(const CMatrix& h, double tol = 1e-8);

/// U_A = [[A, sqrt(I-AA')], [sqrt(I-A'A), -A']], unitary when ||A|| <= 1.
CMatrix unitary_dilation(const CMatrix& a, double tol_contract = tol::contraction);

/// H = [[0, A], [A', 0]]; Hermitian with ||H|| = ||A||.
CMatrix hermitian_dilation(const CMatrix& a);

/// V_A = diag(U_A, U_{A'}), the 4m x 4m block the encoding circuit implements.
CMatrix v_a_matrix(const CMatrix& a, double tol_contract = tol::contraction);

/// Exact A^T by binary exponentiation; the brute-force oracle everything else
/// is checked against.
CMatrix matrix_power_oracle(const CMatrix& a, std::size_t t);

// -- small helpers used across modules ---------------------------------------

double opnorm_diff_identity(const CMatrix& a);  // ||A - I||
/// Frobenius norm of A'A - I; cheap upper bound on the spectral defect.
double unitarity_defect(const CMatrix& a);
bool is_unitary(const CMatrix& a, double tolerance = tol::unitary);
bool is_hermitian(const CMatrix& a, double tolerance = tol::hermitian);

CMatrix random_ginibre(std::size_t n, std::mt19937_64& rng);
CMatrix random_unitary(std::size_t n, std::mt19937_64& rng);
/// Random contraction with spectral norm exactly `norm` (default: uniform in
/// [0.3, 1]).
CMatrix random_contraction(std::size_t n, std::mt19937_64& rng, double norm = -1.0);
CVector random_unit_vector(std::size_t n, std::mt19937_64& rng);

}  // namespace cpk
