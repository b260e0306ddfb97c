#include "cpk/matrix.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

namespace cpk {

namespace {

using EigenMat = Eigen::Matrix<complex_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EigenMap = Eigen::Map<const EigenMat>;

EigenMap to_eigen(const CMatrix& a) {
  return EigenMap(a.data().data(), static_cast<Eigen::Index>(a.rows()),
                  static_cast<Eigen::Index>(a.cols()));
}

CMatrix from_eigen(const EigenMat& m) {
  CMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = m(i, j);
  return out;
}

}  // namespace

CMatrix::CMatrix(std::size_t rows, std::size_t cols, cvector_t entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_)
    throw Error(ErrorCode::DimensionMismatch,
                "entry count " + std::to_string(data_.size()) + " != " +
                    std::to_string(rows_) + "x" + std::to_string(cols_));
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

CMatrix CMatrix::transpose() const {
  CMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

CMatrix CMatrix::conjugate() const {
  CMatrix out(rows_, cols_);
  for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] = std::conj(data_[k]);
  return out;
}

complex_t CMatrix::trace() const {
  complex_t t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

bool CMatrix::is_finite() const {
  for (const auto& z : data_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

CMatrix& CMatrix::operator+=(const CMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw Error(ErrorCode::DimensionMismatch, "matrix add");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += rhs.data_[k];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw Error(ErrorCode::DimensionMismatch, "matrix sub");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= rhs.data_[k];
  return *this;
}

CMatrix& CMatrix::operator*=(complex_t s) {
  for (auto& z : data_) z *= s;
  return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::DimensionMismatch, "matrix product");
  // row-major accumulation below 64; Eigen's blocked gemm above (still a
  // fixed, run-deterministic order)
  if (a.rows() > 64 || b.cols() > 64 || a.cols() > 64) {
    EigenMat r = to_eigen(a) * to_eigen(b);
    return from_eigen(r);
  }
  CMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const complex_t aik = a(i, k);
      if (aik == complex_t{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

CVector CVector::basis(std::size_t dim, std::size_t index) {
  CVector v(dim);
  v[index] = 1.0;
  return v;
}

double CVector::norm() const {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

CVector operator*(const CMatrix& a, const CVector& x) {
  if (a.cols() != x.dim()) throw Error(ErrorCode::DimensionMismatch, "matvec");
  CVector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    complex_t acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
    out[i] = acc;
  }
  return out;
}

complex_t inner(const CVector& a, const CVector& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "inner product");
  complex_t acc = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

CVector vectorize(const CMatrix& a) {
  CVector v(a.rows() * a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) v[i + j * a.rows()] = a(i, j);
  return v;
}

CMatrix unvectorize(const CVector& v, std::size_t rows, std::size_t cols) {
  if (v.dim() != rows * cols) throw Error(ErrorCode::DimensionMismatch, "unvectorize");
  CMatrix a(rows, cols);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) a(i, j) = v[i + j * rows];
  return a;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ia = 0; ia < a.rows(); ++ia)
    for (std::size_t ja = 0; ja < a.cols(); ++ja) {
      const complex_t f = a(ia, ja);
      if (f == complex_t{}) continue;
      for (std::size_t ib = 0; ib < b.rows(); ++ib)
        for (std::size_t jb = 0; jb < b.cols(); ++jb)
          out(ia * b.rows() + ib, ja * b.cols() + jb) = f * b(ib, jb);
    }
  return out;
}

double spectral_norm(const CMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  if (std::max(a.rows(), a.cols()) > 64) {
    Eigen::BDCSVD<EigenMat> svd(to_eigen(a));
    return svd.singularValues()(0);
  }
  Eigen::JacobiSVD<EigenMat> svd(to_eigen(a));
  return svd.singularValues()(0);
}

double unitarity_defect(const CMatrix& a) {
  if (!a.square()) return 1e300;
  EigenMat m = to_eigen(a);
  EigenMat g = m.adjoint() * m;
  g -= EigenMat::Identity(g.rows(), g.cols());
  return g.norm();  // Frobenius; upper-bounds the spectral defect
}

double frobenius_norm(const CMatrix& a) {
  double s = 0.0;
  for (const auto& z : a.data()) s += std::norm(z);
  return std::sqrt(s);
}

bool is_hermitian(const CMatrix& a, double tolerance) {
  if (!a.square()) return false;
  CMatrix d = a - a.adjoint();
  return spectral_norm(d) <= tolerance;
}

bool is_unitary(const CMatrix& a, double tolerance) {
  if (!a.square()) return false;
  return opnorm_diff_identity(a.adjoint() * a) <= tolerance;
}

double opnorm_diff_identity(const CMatrix& a) {
  CMatrix d = a;
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) d(i, i) -= 1.0;
  return spectral_norm(d);
}

HermEig herm_eig(const CMatrix& h, double tol_herm) {
  if (!h.square()) throw Error(ErrorCode::NotHermitian, "matrix not square");
  if (spectral_norm(h - h.adjoint()) > tol_herm)
    throw Error(ErrorCode::NotHermitian, "||H - H'|| exceeds tolerance");
  Eigen::SelfAdjointEigenSolver<EigenMat> solver(to_eigen(h));
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::NotHermitian, "eigendecomposition failed");
  HermEig out;
  const auto& vals = solver.eigenvalues();
  out.eigenvalues.assign(vals.data(), vals.data() + vals.size());
  out.eigenvectors = from_eigen(solver.eigenvectors());
  return out;
}

CMatrix psd_sqrt(const CMatrix& h, double tolerance) {
  HermEig eig = herm_eig(h, 1e-8);
  const std::size_t n = h.rows();
  std::vector<double> roots(n);
  for (std::size_t k = 0; k < n; ++k) {
    double lam = eig.eigenvalues[k];
    if (lam < -tolerance)
      throw Error(ErrorCode::InvalidArgument,
                  "matrix not PSD, eigenvalue " + std::to_string(lam));
    roots[k] = lam > 0.0 ? std::sqrt(lam) : 0.0;
  }
  // V diag(sqrt(lam)) V^dag
  CMatrix out(n, n);
  const CMatrix& v = eig.eigenvectors;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      complex_t acc = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        acc += v(i, k) * roots[k] * std::conj(v(j, k));
      out(i, j) = acc;
    }
  return out;
}

CMatrix unitary_dilation(const CMatrix& a, double tol_contract) {
  if (!a.square()) throw Error(ErrorCode::DimensionMismatch, "dilation needs square input");
  const std::size_t m = a.rows();

  // One SVD A = U diag(s) V' supplies both principal square roots:
  // sqrt(I-AA') = U diag(c) U', sqrt(I-A'A) = V diag(c) V', c = sqrt(1-s^2).
  // Sharing the factors makes the cross blocks of U_A'U_A cancel exactly,
  // which the two independent eigendecompositions cannot guarantee when a
  // singular value sits at 1.
  EigenMat ae = to_eigen(a);
  unsigned options = Eigen::ComputeFullU | Eigen::ComputeFullV;
  Eigen::JacobiSVD<EigenMat> svd(ae, options);
  const auto& sv = svd.singularValues();
  if (sv(0) > 1.0 + tol_contract)
    throw Error(ErrorCode::NotContraction, "spectral norm exceeds 1");
  std::vector<double> c(m);
  for (std::size_t k = 0; k < m; ++k) {
    double s = std::min(1.0, double(sv(Eigen::Index(k))));
    c[k] = std::sqrt(std::max(0.0, (1.0 - s) * (1.0 + s)));
  }
  EigenMat uu = svd.matrixU();
  EigenMat vv = svd.matrixV();
  EigenMat rt = uu * Eigen::VectorXd::Map(c.data(), m).asDiagonal() * uu.adjoint();
  EigenMat rb = vv * Eigen::VectorXd::Map(c.data(), m).asDiagonal() * vv.adjoint();

  CMatrix u(2 * m, 2 * m);
  const CMatrix ad = a.adjoint();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      u(i, j) = a(i, j);
      u(i, m + j) = rt(Eigen::Index(i), Eigen::Index(j));
      u(m + i, j) = rb(Eigen::Index(i), Eigen::Index(j));
      u(m + i, m + j) = -ad(i, j);
    }
  return u;
}

CMatrix hermitian_dilation(const CMatrix& a) {
  if (!a.square()) throw Error(ErrorCode::DimensionMismatch, "dilation needs square input");
  const std::size_t m = a.rows();
  CMatrix h(2 * m, 2 * m);
  const CMatrix ad = a.adjoint();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      h(i, m + j) = a(i, j);
      h(m + i, j) = ad(i, j);
    }
  return h;
}

CMatrix v_a_matrix(const CMatrix& a, double tol_contract) {
  const std::size_t m = a.rows();
  CMatrix ua = unitary_dilation(a, tol_contract);
  CMatrix uad = unitary_dilation(a.adjoint(), tol_contract);
  CMatrix v(4 * m, 4 * m);
  for (std::size_t i = 0; i < 2 * m; ++i)
    for (std::size_t j = 0; j < 2 * m; ++j) {
      v(i, j) = ua(i, j);
      v(2 * m + i, 2 * m + j) = uad(i, j);
    }
  return v;
}

CMatrix matrix_power_oracle(const CMatrix& a, std::size_t t) {
  if (!a.square()) throw Error(ErrorCode::DimensionMismatch, "power needs square input");
  CMatrix result = CMatrix::identity(a.rows());
  CMatrix base = a;
  while (t > 0) {
    if (t & 1) result = result * base;
    t >>= 1;
    if (t > 0) base = base * base;
  }
  return result;
}

CMatrix random_ginibre(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMatrix g(n, n);
  for (auto& z : g.data()) {
    double re = gauss(rng);
    double im = gauss(rng);
    z = complex_t(re, im);
  }
  return g;
}

CMatrix random_unitary(std::size_t n, std::mt19937_64& rng) {
  CMatrix g = random_ginibre(n, rng);
  Eigen::HouseholderQR<EigenMat> qr(to_eigen(g));
  EigenMat q = qr.householderQ() * EigenMat::Identity(n, n);
  EigenMat r = qr.matrixQR().template triangularView<Eigen::Upper>();
  // fix phases so the distribution is Haar
  for (std::size_t j = 0; j < n; ++j) {
    complex_t d = r(j, j);
    complex_t ph = std::abs(d) > 0 ? d / std::abs(d) : complex_t(1.0);
    for (std::size_t i = 0; i < n; ++i) q(i, j) *= ph;
  }
  return from_eigen(q);
}

CMatrix random_contraction(std::size_t n, std::mt19937_64& rng, double norm) {
  CMatrix g = random_ginibre(n, rng);
  double target = norm;
  if (target < 0.0) {
    std::uniform_real_distribution<double> u(0.3, 1.0);
    target = u(rng);
  }
  double s = spectral_norm(g);
  if (s == 0.0) return CMatrix::zero(n, n);
  return g * complex_t(target / s);
}

CVector random_unit_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVector v(n);
  for (auto& z : v.data()) z = complex_t(gauss(rng), gauss(rng));
  double nn = v.norm();
  for (auto& z : v.data()) z /= nn;
  return v;
}

}  // namespace cpk
