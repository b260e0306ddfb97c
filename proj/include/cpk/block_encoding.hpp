#pragma once

#include <cstdint>

#include "cpk/circuit.hpp"

namespace cpk {

/// Estimation grid lambda(j) = 2*pi*j/2^ell - pi, truncated to [-1, 1].
struct PhaseGrid {
  std::size_t ell;
  std::vector<double> values;

  explicit PhaseGrid(std::size_t ell_);
};

/// exp(i*H*t) for a Hermitian contraction H, computed exactly through the
/// eigendecomposition. Stands in for the space-efficient Hamiltonian
/// simulation subroutine, whose circuit internals are out of scope here.
CMatrix hamiltonian_exponential(const CMatrix& h, double t);

/// Standard phase estimation over exp(iH) on layout [("sys", d), ("est", 2^ell)]:
/// Fourier prep, basis-controlled powers of the evolution (with the grid's -pi
/// offset folded into the controlled unitary), inverse Fourier transform.
Circuit qpe_circuit(const CMatrix& h, std::size_t ell);

/// The 2^ell reflections U_{lambda(j)} = [[l, s],[s, -l]], s = sqrt(1-l^2),
/// on register "d0", each controlled on the estimation register holding j.
std::vector<GateOp> eigenvalue_rotation(std::size_t ell);

/// Encoding circuit Q_A for a contraction A: Pi2 conjugation on the dilation
/// qubits, forward phase estimation of the Hermitian dilation, eigenvalue
/// rotation, reverse phase estimation, Pi1 conjugation. Registers:
/// d0 (2), d1 (2), vec (m, omitted when m = 1), est (2^ell).
struct BlockEncoding {
  CMatrix source;   // the m x m contraction A
  std::size_t ell;
  Circuit circuit;
  double eps;

  std::size_t m() const { return source.rows(); }
  /// v of dimension 4m placed on (d0, d1, vec) with est = |0...0>.
  StateVector initial_state(const CVector& v) const;
};

/// ell giving internal phase-estimation budget eps1 = eps^2/12, one guard bit:
/// smallest ell with 2^ell > pi/eps1, plus 1.
std::size_t ell_for_budget(double eps);

BlockEncoding block_encoding_circuit(const CMatrix& a, double eps);

/// Same construction with the grid size pinned explicitly. The powering
/// circuit uses this with a leaner grid; see notes there.
BlockEncoding block_encoding_circuit_with_ell(const CMatrix& a, double eps, std::size_t ell,
                                              std::size_t dim_cap = 0);

/// Max over seeded random unit v of || Q_A (v x 0) - (V_A v) x 0 ||.
double verify_block_encoding(const BlockEncoding& be, std::size_t trials, std::uint64_t seed);

/// Corollary wrapper: encode a unitary U with the two dilation qubits pinned
/// to |00>, so the vec register carries Uv.
BlockEncoding unitary_implementation(const CMatrix& u, double eps);

/// Max over seeded random unit v (dim m) of the distance between the encoded
/// output and |00> x (Uv) x |0...0>.
double verify_unitary_implementation(const BlockEncoding& be, std::size_t trials,
                                     std::uint64_t seed);

}  // namespace cpk
