#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cpk/matrix.hpp"

namespace cpk {

/// Ordered list of named registers. Registers may have any dimension >= 2,
/// not only powers of two; the first register is the most significant in the
/// amplitude index, the last one varies fastest.
class RegisterLayout {
 public:
  struct Register {
    std::string name;
    std::size_t dim;
  };

  RegisterLayout() = default;
  explicit RegisterLayout(std::vector<Register> regs,
                          std::size_t dim_cap = default_dim_cap());

  std::size_t size() const { return regs_.size(); }
  const Register& reg(std::size_t i) const { return regs_[i]; }
  const std::vector<Register>& registers() const { return regs_; }

  std::size_t total_dim() const { return total_; }
  std::size_t index_of(const std::string& name) const;  // throws LayoutMismatch
  std::size_t stride(std::size_t reg_index) const { return strides_[reg_index]; }
  std::size_t dim(std::size_t reg_index) const { return regs_[reg_index].dim; }

  bool operator==(const RegisterLayout& other) const;

 private:
  std::vector<Register> regs_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 1;
};

/// One gate: a unitary payload on named target registers, optionally gated on
/// other registers holding exact basis values.
struct GateOp {
  enum class Kind { Dense, TwoLevel, Fourier, PhaseLadder };

  struct Control {
    std::string reg;
    std::size_t value;
  };

  Kind kind = Kind::Dense;
  std::vector<std::string> targets;
  std::vector<Control> controls;

  // Dense: matrix of dim = product of target dims, basis ordered with the
  // first target most significant. The adjoint flag lets inverted circuits
  // share payload storage with their originals.
  std::shared_ptr<const CMatrix> matrix;
  bool adjoint = false;

  // TwoLevel: 2x2 block acting on basis levels (a, b) of a single target.
  std::size_t level_a = 0, level_b = 0;
  complex_t tl[4] = {1.0, 0.0, 0.0, 1.0};

  // Fourier: F[j,k] = exp(2*pi*i*j*k/N)/sqrt(N) on a single power-of-two
  // register; `fourier_inverse` selects F^dag. Applied via FFT, so the gate
  // never materializes as a matrix.
  bool fourier_inverse = false;

  // PhaseLadder: diagonal unitary exp(i * j * angles[k]) where k is the
  // combined basis value of all targets but the last and j is the last
  // target's value. This is a controlled-power ladder expressed in whatever
  // basis the surrounding gates have rotated the system into.
  std::shared_ptr<const std::vector<double>> angles;

  static GateOp dense(std::vector<std::string> targets, CMatrix m,
                      std::vector<Control> controls = {});
  static GateOp dense_shared(std::vector<std::string> targets,
                             std::shared_ptr<const CMatrix> m,
                             std::vector<Control> controls = {},
                             bool adjoint = false, bool validate = true);
  static GateOp two_level(std::string target, std::size_t a, std::size_t b,
                          complex_t m00, complex_t m01, complex_t m10, complex_t m11,
                          std::vector<Control> controls = {});
  static GateOp fourier(std::string target, bool inverse,
                        std::vector<Control> controls = {});
  static GateOp phase_ladder(std::vector<std::string> targets,
                             std::shared_ptr<const std::vector<double>> angles,
                             bool adjoint = false);

  GateOp adjoint_op() const;
};

struct Circuit {
  RegisterLayout layout;
  std::vector<GateOp> ops;

  Circuit() = default;
  Circuit(RegisterLayout l, std::vector<GateOp> o);

  void validate_op(const GateOp& op) const;
  void append(GateOp op);
};

class StateVector {
 public:
  StateVector() = default;
  /// All-zero basis state.
  explicit StateVector(RegisterLayout layout);
  /// From raw amplitudes; enforces unit norm within tolerance.
  StateVector(RegisterLayout layout, cvector_t amps, double tolerance = tol::unit_norm);

  static StateVector basis(RegisterLayout layout,
                           const std::vector<std::pair<std::string, std::size_t>>& values);

  const RegisterLayout& layout() const { return layout_; }
  const cvector_t& amplitudes() const { return amps_; }
  cvector_t& amplitudes() { return amps_; }
  double norm() const;

 private:
  RegisterLayout layout_;
  cvector_t amps_;
};

/// Apply a single gate; pure (copies the state).
StateVector apply_gate(const StateVector& state, const GateOp& op);

/// In-place kernel shared by apply_gate/run.
void apply_gate_inplace(StateVector& state, const GateOp& op);

StateVector run(const Circuit& circuit, const StateVector& initial);

/// Reversed ops with conjugate-transposed payloads.
Circuit invert(const Circuit& circuit);

/// Probability of the named registers holding exactly the pattern values,
/// summed over everything else.
double projection_prob(const StateVector& state,
                       const std::vector<std::pair<std::string, std::size_t>>& pattern);

/// Full matrix of the circuit, by running it on every basis vector.
/// Restricted to total dimension <= 2^12.
CMatrix circuit_unitary(const Circuit& circuit);

}  // namespace cpk
