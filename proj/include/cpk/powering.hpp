#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "cpk/block_encoding.hpp"

namespace cpk {

enum class PoweringMode { Ideal, Circuit };

/// One contraction-powering problem: estimate |w' A^T v|^2.
struct PoweringInstance {
  CMatrix A;
  std::size_t T = 1;
  CVector v, w;
  double eps = 0.1;

  PoweringInstance(CMatrix a, std::size_t t, CVector v_, CVector w_, double eps_);
};

/// Session caps. Circuit mode allocates a 2T * 4m * 2^ell state, so it is
/// gated much harder than ideal mode.
struct PoweringLimits {
  std::size_t max_T = 16;
  std::size_t max_m_circuit = 64;
  std::size_t max_ell = 18;
  std::size_t max_total_dim = std::size_t{1} << 23;
};

/// Grid size for one encoding step with per-step budget eps_step: the
/// measured step error of the exact-evolution encoding is ~1.9 * 2^(-ell/2),
/// so 2^(ell/2) >= 1.9/eps_step keeps each step inside its budget.
std::size_t ell_for_powering_step(double eps_step, const PoweringLimits& limits = {});

struct PoweringRun {
  double prob = 0.0;
  complex_t zero_amplitude;  // <0...0|W|0...0>
  // counter bookkeeping, tracked per repetition
  double max_mass_on_counter1 = 0.0;    // before each encoding step
  double max_forbidden_mass = 0.0;      // after step i: counter >= 2i plus spares
  std::size_t gate_count = 0;
  std::size_t total_dim = 0;
  std::size_t ell = 0;  // 0 in ideal mode
};

/// The full powering circuit: prepare v, T repetitions of (encoding step,
/// counter rotation), unprepare w. Counter value c lives on registers
/// (slot, d0, d1) as c = 4*slot + 2*d0 + d1; the encoding step targets
/// (d0, d1, vec) and is block-diagonal over slots, which is exactly the
/// pairing of counter values {2i, 2i+1} the analysis needs. For odd T the
/// two top dims (slot_max, d0=1, *) are spares fixed by the rotation.
Circuit powering_circuit(const PoweringInstance& inst,
                         PoweringMode mode = PoweringMode::Circuit,
                         const PoweringLimits& limits = {});

PoweringRun powering_prob(const PoweringInstance& inst, PoweringMode mode,
                          const PoweringLimits& limits = {});

struct AmplifiedResult {
  double prob_orthogonal = 0.0;  // sin^2(p + alpha)
  double overlap = 0.0;          // |<0|W|0>|
  PoweringRun run;
};

/// Applies R = (I - 2 W|0><0|W')(I - 2|0><0|) k times to |0...0> in the full
/// state space and returns the probability off |0...0>.
AmplifiedResult amplified_prob(const PoweringInstance& inst, std::size_t grover_rounds,
                               PoweringMode mode = PoweringMode::Ideal,
                               const PoweringLimits& limits = {});

/// Emulation of the amplitude-amplified estimation contract: queries return
/// the true probability within `accuracy` except with probability `delta`,
/// independently per query.
class NoisyProbOracle {
 public:
  enum class Kind { BoundedUniform, TwoValue, Scripted };

  static NoisyProbOracle bounded(double truth, double accuracy, double delta,
                                 std::uint64_t seed);
  /// Adversarial: each query independently returns one of two fixed values.
  static NoisyProbOracle two_value(double p1, double p2, std::uint64_t seed);
  /// Fully scripted query stream (for exhaustive path enumeration in tests).
  static NoisyProbOracle scripted(std::vector<double> values);

  double query();
  double accuracy() const { return accuracy_; }
  double delta() const { return delta_; }

 private:
  NoisyProbOracle() = default;
  Kind kind_ = Kind::BoundedUniform;
  double truth_ = 0.0, accuracy_ = 0.0, delta_ = 0.0;
  double p1_ = 0.0, p2_ = 0.0;
  std::vector<double> script_;
  std::size_t script_pos_ = 0;
  std::mt19937_64 rng_;
};

/// Most-significant-bit-first extraction: recovers q with |q - p| <= eps/2
/// from an oracle whose queries are eps/4-accurate, robust to the queries
/// disagreeing between themselves.
double extract_value(NoisyProbOracle& oracle, double eps);

/// Number of bits extract_value consumes for a given eps.
std::size_t extract_bit_count(double eps);

/// Pure algebra of the corollary: w'A^Tv from the three squared magnitudes
/// |w'A^Tv|^2, |w1'A1^Tv1|^2, |w1'A1^Tv1p|^2.
complex_t bilinear_combination(double p_z, double p_plus, double p_plus_i);

/// Estimates w'A^Tv to inst.eps by powering the three auxiliary instances and
/// extracting each squared magnitude to eps/4 through the noisy oracle.
complex_t bilinear_value(const PoweringInstance& inst, PoweringMode mode, std::uint64_t seed,
                         const PoweringLimits& limits = {});

/// Emulated norm-estimation contract: exact ||A/||A||_F|| plus seeded uniform
/// noise bounded by eps1.
double spectral_norm_estimate(const CMatrix& a, double eps1, std::uint64_t seed);

struct GeneralPowerResult {
  complex_t value;
  double alpha = 0.0;  // the rescaling factor, in [||A||, (1+1/T)||A||]
};

/// w'A^Tv for arbitrary nonzero A with additive error eps * max(1, ||A||^T):
/// rescale by alpha from the norm estimate, power the contraction, multiply
/// back by alpha^T.
GeneralPowerResult general_power(const CMatrix& a, std::size_t T, const CVector& v,
                                 const CVector& w, double eps, std::uint64_t seed,
                                 PoweringMode mode = PoweringMode::Ideal,
                                 const PoweringLimits& limits = {});

}  // namespace cpk
