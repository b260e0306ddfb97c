#pragma once

#include <vector>

#include "cpk/circuit.hpp"

namespace cpk {

/// Permutation of {1,...,m}, stored as images[i-1] = sigma(i).
struct Permutation {
  std::size_t m = 0;
  std::vector<std::size_t> images;

  Permutation() = default;
  Permutation(std::size_t m_, std::vector<std::size_t> images_);

  static Permutation identity(std::size_t m);

  std::size_t apply(std::size_t i) const { return images[i - 1]; }  // 1-based

  /// P_sigma in {0,1}^{m x m}: column i carries a 1 at row sigma(i).
  CMatrix matrix() const;
};

/// 1-based transposition (a b); a == b is the identity factor.
struct Transposition {
  std::size_t a = 1, b = 1;
};

/// sigma written as (1 tau(1))(2 tau(2))...(m tau(m)), factors applied
/// right-to-left: compose_transpositions reproduces sigma exactly.
std::vector<std::size_t> tau(const Permutation& sigma);
std::vector<Transposition> decompose(const Permutation& sigma);
Permutation compose_transpositions(std::size_t m, const std::vector<Transposition>& ts);

/// Circuit of at most m two-level swaps equal to P_sigma on one dim-`dim`
/// register (identity on basis dims >= m). Register name: "q".
Circuit perm_circuit(const Permutation& sigma, std::size_t dim);

/// State-preparation coefficients a_i = v_i / sqrt(|v_i|^2 + ... + |v_m|^2),
/// maintained by streaming tail subtraction. Where the tail drops below
/// tol::tail the coefficient defaults to 1 (identity rotation); amplitude
/// reaching those dims is negligible so any unitary completion works.
std::vector<complex_t> prep_coefficients(const CVector& v, double tol_unit = tol::unit_norm);

/// Same streaming rule applied to an arbitrary (not necessarily unit) entry
/// vector with the tail seeded at 1; used when the entries are estimates.
std::vector<complex_t> prep_coefficients_streamed(const cvector_t& entries);

/// Gates of the preparation cascade on register `reg`: step i applies the
/// two-level rotation with column (a_i, s_i) on basis dims (i-1, i).
std::vector<GateOp> prep_gates(const std::vector<complex_t>& coeffs, const std::string& reg);

/// Exact variant used by prep_circuit: tails accumulated backward and the
/// last gate's lower entry carrying the phase of v's final amplitude.
std::vector<GateOp> prep_gates_exact(const CVector& v, const std::string& reg);

/// Q_v on a single register "q" of dimension 2^S with ||Q_v|0> - v|| <= 1e-8.
Circuit prep_circuit(const CVector& v, double tol_unit = tol::unit_norm);

}  // namespace cpk
