#include "cpk/block_encoding.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "cpk/rng.hpp"

namespace cpk {

namespace {

constexpr double kPi = std::numbers::pi;

void check_hermitian_contraction(const HermEig& eig) {
  for (double lam : eig.eigenvalues)
    if (std::abs(lam) > 1.0 + tol::contraction)
      throw Error(ErrorCode::NotContraction, "eigenvalue " + std::to_string(lam));
}

CMatrix eig_phase_matrix(const HermEig& eig, const std::vector<complex_t>& phases) {
  const std::size_t n = eig.eigenvectors.rows();
  const CMatrix& v = eig.eigenvectors;
  CMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      complex_t acc = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        acc += v(i, k) * phases[k] * std::conj(v(j, k));
      out(i, j) = acc;
    }
  return out;
}

/// Controlled-power ladder of the offset evolution -exp(iH): for every j the
/// gate exp(i*j*(H + pi*I)) on `sys_targets`, controlled on est = j. The -pi
/// grid offset of lambda(j) lives in that sign. j = 0 is the identity and is
/// skipped. The inverse ladder shares the forward payloads with the adjoint
/// flag set.
void append_qpe(Circuit& c, const HermEig& eig, std::size_t ell,
                const std::vector<std::string>& sys_targets, const std::string& est,
                bool inverse, std::vector<std::shared_ptr<const CMatrix>>& payload_cache) {
  const std::size_t n = std::size_t{1} << ell;
  const std::size_t dim = eig.eigenvectors.rows();
  c.append(GateOp::fourier(est, false));
  if (payload_cache.empty()) {
    payload_cache.reserve(n - 1);
    std::vector<complex_t> ph(dim, 1.0), step(dim);
    for (std::size_t k = 0; k < dim; ++k)
      step[k] = std::polar(1.0, eig.eigenvalues[k] + kPi);
    for (std::size_t j = 1; j < n; ++j) {
      for (std::size_t k = 0; k < dim; ++k) ph[k] *= step[k];
      payload_cache.push_back(std::make_shared<const CMatrix>(eig_phase_matrix(eig, ph)));
    }
  }
  for (std::size_t j = 1; j < n; ++j)
    c.append(GateOp::dense_shared(sys_targets, payload_cache[j - 1], {{est, j}}, inverse,
                                  /*validate=*/false));
  c.append(GateOp::fourier(est, true));
}

CMatrix perm4(const std::array<std::size_t, 4>& images) {
  CMatrix p(4, 4);
  for (std::size_t c = 0; c < 4; ++c) p(images[c], c) = 1.0;
  return p;
}

}  // namespace

PhaseGrid::PhaseGrid(std::size_t ell_) : ell(ell_) {
  const std::size_t n = std::size_t{1} << ell;
  values.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    double raw = 2.0 * kPi * double(j) / double(n) - kPi;
    values[j] = std::clamp(raw, -1.0, 1.0);
  }
}

CMatrix hamiltonian_exponential(const CMatrix& h, double t) {
  HermEig eig = herm_eig(h);
  check_hermitian_contraction(eig);
  std::vector<complex_t> phases(eig.eigenvalues.size());
  for (std::size_t k = 0; k < phases.size(); ++k)
    phases[k] = std::polar(1.0, eig.eigenvalues[k] * t);
  return eig_phase_matrix(eig, phases);
}

Circuit qpe_circuit(const CMatrix& h, std::size_t ell) {
  if (ell < 1) throw Error(ErrorCode::InvalidArgument, "ell >= 1 required");
  HermEig eig = herm_eig(h);
  check_hermitian_contraction(eig);
  std::size_t needed = h.rows() << ell;
  RegisterLayout layout({{"sys", h.rows()}, {"est", std::size_t{1} << ell}},
                        std::max(default_dim_cap(), needed));
  Circuit c(layout, {});
  std::vector<std::shared_ptr<const CMatrix>> cache;
  append_qpe(c, eig, ell, {"sys"}, "est", false, cache);
  return c;
}

std::vector<GateOp> eigenvalue_rotation(std::size_t ell) {
  PhaseGrid grid(ell);
  std::vector<GateOp> gates;
  gates.reserve(grid.values.size());
  for (std::size_t j = 0; j < grid.values.size(); ++j) {
    double l = grid.values[j];
    double s = std::sqrt(std::max(0.0, 1.0 - l * l));
    CMatrix u(2, 2, {l, s, s, -l});
    gates.push_back(GateOp::dense({"d0"}, std::move(u), {{"est", j}}));
  }
  return gates;
}

std::size_t ell_for_budget(double eps) {
  if (!(eps > 0.0) || eps >= 1.0)
    throw Error(ErrorCode::InvalidArgument, "eps must be in (0, 1)");
  const double eps1 = eps * eps / 12.0;
  std::size_t ell = 1;
  while (std::pow(2.0, double(ell)) <= kPi / eps1) ++ell;
  return ell + 1;
}

BlockEncoding block_encoding_circuit_with_ell(const CMatrix& a, double eps, std::size_t ell,
                                              std::size_t dim_cap) {
  if (!a.square() || !is_pow2(a.rows()))
    throw Error(ErrorCode::NotPowerOfTwo, "block encoding needs power-of-two dimension");
  if (spectral_norm(a) > 1.0 + tol::contraction)
    throw Error(ErrorCode::NotContraction, "spectral norm exceeds 1");

  const std::size_t m = a.rows();
  const std::size_t n_est = std::size_t{1} << ell;
  std::vector<RegisterLayout::Register> regs = {{"d0", 2}, {"d1", 2}};
  if (m > 1) regs.push_back({"vec", m});
  regs.push_back({"est", n_est});
  std::size_t needed = 4 * m * n_est;
  RegisterLayout layout(std::move(regs),
                        dim_cap ? dim_cap : std::max(default_dim_cap(), needed));

  std::vector<std::string> sys =
      m > 1 ? std::vector<std::string>{"d1", "vec"} : std::vector<std::string>{"d1"};

  HermEig eig = herm_eig(hermitian_dilation(a));
  check_hermitian_contraction(eig);

  Circuit c(layout, {});
  c.append(GateOp::dense({"d0", "d1"}, perm4({1, 2, 0, 3})));  // Pi2
  std::vector<std::shared_ptr<const CMatrix>> ladder;
  append_qpe(c, eig, ell, sys, "est", false, ladder);
  for (auto& g : eigenvalue_rotation(ell)) c.append(std::move(g));
  append_qpe(c, eig, ell, sys, "est", true, ladder);
  c.append(GateOp::dense({"d0", "d1"}, perm4({0, 2, 3, 1})));  // Pi1

  return BlockEncoding{a, ell, std::move(c), eps};
}

BlockEncoding block_encoding_circuit(const CMatrix& a, double eps) {
  return block_encoding_circuit_with_ell(a, eps, ell_for_budget(eps));
}

StateVector BlockEncoding::initial_state(const CVector& v) const {
  const std::size_t mm = m();
  if (v.dim() != 4 * mm)
    throw Error(ErrorCode::DimensionMismatch, "block encoding input must have dim 4m");
  const std::size_t n_est = std::size_t{1} << ell;
  cvector_t amps(4 * mm * n_est);
  for (std::size_t i = 0; i < 4 * mm; ++i) amps[i * n_est] = v[i];
  return StateVector(circuit.layout, std::move(amps));
}

double verify_block_encoding(const BlockEncoding& be, std::size_t trials, std::uint64_t seed) {
  const std::size_t mm = be.m();
  const std::size_t n_est = std::size_t{1} << be.ell;
  CMatrix va = v_a_matrix(be.source);
  auto rng = SeedStream(seed).stream("verify-block-encoding");
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    CVector v = random_unit_vector(4 * mm, rng);
    StateVector out = run(be.circuit, be.initial_state(v));
    CVector tv = va * v;
    double err2 = 0.0;
    for (std::size_t i = 0; i < 4 * mm; ++i)
      for (std::size_t e = 0; e < n_est; ++e) {
        complex_t want = (e == 0) ? tv[i] : complex_t{};
        err2 += std::norm(out.amplitudes()[i * n_est + e] - want);
      }
    worst = std::max(worst, std::sqrt(err2));
  }
  return worst;
}

BlockEncoding unitary_implementation(const CMatrix& u, double eps) {
  if (!is_unitary(u)) throw Error(ErrorCode::NotUnitary, "input is not unitary");
  return block_encoding_circuit(u, eps);
}

double verify_unitary_implementation(const BlockEncoding& be, std::size_t trials,
                                     std::uint64_t seed) {
  const std::size_t mm = be.m();
  const std::size_t n_est = std::size_t{1} << be.ell;
  auto rng = SeedStream(seed).stream("verify-unitary-impl");
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    CVector v = random_unit_vector(mm, rng);
    CVector full(4 * mm);
    for (std::size_t i = 0; i < mm; ++i) full[i] = v[i];  // d0 = d1 = |0>
    StateVector out = run(be.circuit, be.initial_state(full));
    CVector uv = be.source * v;
    double err2 = 0.0;
    for (std::size_t i = 0; i < 4 * mm; ++i)
      for (std::size_t e = 0; e < n_est; ++e) {
        complex_t want = (i < mm && e == 0) ? uv[i] : complex_t{};
        err2 += std::norm(out.amplitudes()[i * n_est + e] - want);
      }
    worst = std::max(worst, std::sqrt(err2));
  }
  return worst;
}

}  // namespace cpk
