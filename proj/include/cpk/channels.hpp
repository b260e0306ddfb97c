#pragma once

#include <cstdint>

#include "cpk/powering.hpp"

namespace cpk {

/// Kraus operators of one time step; trace preservation is a construction
/// invariant, unitality is checked where the reduction requires it.
struct ChannelStep {
  std::vector<CMatrix> kraus;

  explicit ChannelStep(std::vector<CMatrix> ops, double tolerance = tol::unitary);

  std::size_t dim() const { return kraus.empty() ? 0 : kraus[0].rows(); }
  bool is_unital(double tolerance = tol::unitary) const;
};

/// A bounded-space program: T channel steps on S qubits followed by a
/// computational-basis measurement given as diagonal 0/1 projectors.
struct ChannelProgram {
  std::size_t space = 1;                           // S; m = 2^S
  std::vector<ChannelStep> steps;
  std::vector<std::vector<std::uint8_t>> measurement;  // r diagonal projectors

  ChannelProgram(std::size_t space_, std::vector<ChannelStep> steps_,
                 std::vector<std::vector<std::uint8_t>> measurement_);

  std::size_t dim() const { return std::size_t{1} << space; }
  std::size_t T() const { return steps.size(); }
  std::size_t outcomes() const { return measurement.size(); }
  bool all_unital(double tolerance = tol::unitary) const;
};

/// K(Phi) = sum conj(E_i) (x) E_i; a contraction iff the step is unital.
CMatrix natural_rep(const ChannelStep& step);

/// rho -> sum E_i rho E_i'; validates that rho is a density matrix.
CMatrix apply_channel(const CMatrix& rho, const ChannelStep& step);

/// Brute-force oracle: evolve rho_0 = |0^S><0^S| through every step and read
/// out Tr[rho_T M_j].
std::vector<double> exact_output_distribution(const ChannelProgram& prog);

/// The m^2 T x m^2 T contraction whose T-th power routes K(Phi_T)...K(Phi_1)
/// back to the first block: block (0, T-1) holds K(Phi_T), block (i, i-1)
/// holds K(Phi_i). Requires every step unital.
CMatrix block_matrix(const ChannelProgram& prog);

/// Reduction of a two-outcome unital program to one powering instance with
/// w' A^T v = sqrt(2/m) * p.
struct UnitalReduction {
  PoweringInstance instance;
  std::size_t m_padded = 0;       // density dimension after dummy qubits
  std::size_t grover_rounds = 0;  // k = sqrt(m_padded / 8)
  double value_scale = 0.0;       // sqrt(2/m_padded)
};

struct UnitalPadding {
  bool auto_pad = true;
  /// Cap on the density dimension the eps-floor may request. The floor
  /// m >= 4/eps exists to dominate a cubic angle correction whose true size
  /// is p^3/(3m); dimension 8 already keeps it below 0.045.
  std::size_t max_density_dim = 8;
};

/// Dummy-qubit padding to an odd number of qubits and density dimension >= 8,
/// extending the two-outcome measurement so M_0 projects onto exactly half of
/// the padded space.
ChannelProgram pad_program_for_unital(const ChannelProgram& prog, double eps,
                                      const UnitalPadding& padding = {});

UnitalReduction build_unital_reduction(const ChannelProgram& prog, double eps,
                                       const UnitalPadding& padding = {});

struct UnitalSimResult {
  double sin2_value = 0.0;  // raw output probability sin^2(p + alpha)
  double p_hat = 0.0;       // arcsin-inverted estimate of p
  double eps_total = 0.0;   // |alpha| budget; the arcsin branch is exact here
  std::size_t m_padded = 0;
  std::size_t grover_rounds = 0;
};

UnitalSimResult simulate_unital(const ChannelProgram& prog, double eps,
                                PoweringMode mode = PoweringMode::Ideal,
                                const UnitalPadding& padding = {},
                                const PoweringLimits& limits = {});

/// Full output-distribution synthesis: estimate each sqrt(Tr[rho_T M_j]) to
/// eps/(2m) through the bilinear pipeline, assemble the preparation
/// coefficients from the streamed estimates, and return the prepared |w_j|^2.
std::vector<double> output_distribution(const ChannelProgram& prog, double eps,
                                        std::uint64_t seed = 0,
                                        PoweringMode mode = PoweringMode::Ideal,
                                        const PoweringLimits& limits = {});

// -- generators shared by tests, the verify suites, and the CLI -------------

ChannelStep identity_step(std::size_t m);
ChannelStep dephasing_step(std::size_t m);
ChannelStep random_mixed_unitary_step(std::size_t m, std::size_t k, std::mt19937_64& rng);
/// Trace-preserving but not unital; K(Phi) has norm > 1.
ChannelStep amplitude_damping_step(double gamma);
ChannelProgram random_unital_program(std::size_t space, std::size_t T, std::size_t outcomes,
                                     std::mt19937_64& rng);

}  // namespace cpk
