#include "cpk/channels.hpp"

#include <algorithm>
#include <cmath>

#include "cpk/rng.hpp"
#include "cpk/synthesis.hpp"

namespace cpk {

namespace {

CMatrix kraus_gram(const std::vector<CMatrix>& kraus, bool left) {
  const std::size_t m = kraus[0].rows();
  CMatrix acc(m, m);
  for (const auto& e : kraus) acc += left ? e * e.adjoint() : e.adjoint() * e;
  return acc;
}

double trace_norm_defect(const CMatrix& g) {
  CMatrix d = g;
  for (std::size_t i = 0; i < d.rows(); ++i) d(i, i) -= 1.0;
  return frobenius_norm(d);
}

void check_measurement(std::size_t m, const std::vector<std::vector<std::uint8_t>>& ms) {
  if (ms.size() < 2) throw Error(ErrorCode::InvalidProgram, "need at least two outcomes");
  for (const auto& diag : ms) {
    if (diag.size() != m)
      throw Error(ErrorCode::InvalidProgram, "measurement diagonal has wrong length");
    for (auto b : diag)
      if (b > 1) throw Error(ErrorCode::InvalidProgram, "projectors must be 0/1 diagonal");
  }
  for (std::size_t x = 0; x < m; ++x) {
    std::size_t ones = 0;
    for (const auto& diag : ms) ones += diag[x];
    if (ones != 1)
      throw Error(ErrorCode::InvalidProgram, "projectors must partition the basis");
  }
}

std::size_t rank_of(const std::vector<std::uint8_t>& diag) {
  std::size_t r = 0;
  for (auto b : diag) r += b;
  return r;
}

}  // namespace

ChannelStep::ChannelStep(std::vector<CMatrix> ops, double tolerance) : kraus(std::move(ops)) {
  if (kraus.empty()) throw Error(ErrorCode::InvalidKraus, "no Kraus operators");
  const std::size_t m = kraus[0].rows();
  for (const auto& e : kraus) {
    if (!e.square() || e.rows() != m)
      throw Error(ErrorCode::InvalidKraus, "Kraus operators must share a square dimension");
    if (!e.is_finite()) throw Error(ErrorCode::InvalidKraus, "non-finite Kraus entry");
  }
  if (trace_norm_defect(kraus_gram(kraus, false)) > tolerance * std::sqrt(double(m)) + tolerance)
    throw Error(ErrorCode::InvalidKraus, "sum E'E != I (not trace preserving)");
}

bool ChannelStep::is_unital(double tolerance) const {
  const std::size_t m = dim();
  return trace_norm_defect(kraus_gram(kraus, true)) <=
         tolerance * std::sqrt(double(m)) + tolerance;
}

ChannelProgram::ChannelProgram(std::size_t space_, std::vector<ChannelStep> steps_,
                               std::vector<std::vector<std::uint8_t>> measurement_)
    : space(space_), steps(std::move(steps_)), measurement(std::move(measurement_)) {
  const std::size_t m = dim();
  for (const auto& s : steps)
    if (s.dim() != m)
      throw Error(ErrorCode::InvalidProgram, "step dimension != 2^space");
  check_measurement(m, measurement);
}

bool ChannelProgram::all_unital(double tolerance) const {
  for (const auto& s : steps)
    if (!s.is_unital(tolerance)) return false;
  return true;
}

CMatrix natural_rep(const ChannelStep& step) {
  const std::size_t m = step.dim();
  CMatrix k(m * m, m * m);
  for (const auto& e : step.kraus) k += kron(e.conjugate(), e);
  return k;
}

CMatrix apply_channel(const CMatrix& rho, const ChannelStep& step) {
  if (rho.rows() != step.dim() || !rho.square())
    throw Error(ErrorCode::InvalidState, "state dimension mismatch");
  if (std::abs(rho.trace() - complex_t(1.0)) > 1e-9)
    throw Error(ErrorCode::InvalidState, "state trace != 1");
  HermEig eig = herm_eig(rho, 1e-9);
  if (eig.eigenvalues.front() < -1e-9)
    throw Error(ErrorCode::InvalidState, "state is not PSD");
  CMatrix out(rho.rows(), rho.cols());
  for (const auto& e : step.kraus) out += e * rho * e.adjoint();
  return out;
}

std::vector<double> exact_output_distribution(const ChannelProgram& prog) {
  const std::size_t m = prog.dim();
  CMatrix rho(m, m);
  rho(0, 0) = 1.0;
  for (const auto& step : prog.steps) rho = apply_channel(rho, step);
  std::vector<double> probs(prog.outcomes(), 0.0);
  for (std::size_t j = 0; j < prog.outcomes(); ++j) {
    double p = 0.0;
    for (std::size_t x = 0; x < m; ++x)
      if (prog.measurement[j][x]) p += rho(x, x).real();
    probs[j] = p;
  }
  return probs;
}

CMatrix block_matrix(const ChannelProgram& prog) {
  if (prog.T() < 1) throw Error(ErrorCode::InvalidProgram, "need at least one step");
  if (!prog.all_unital()) throw Error(ErrorCode::NotUnital, "reduction needs unital steps");
  const std::size_t m2 = prog.dim() * prog.dim();
  const std::size_t T = prog.T();
  CMatrix a(m2 * T, m2 * T);
  for (std::size_t i = 0; i < T; ++i) {
    CMatrix k = natural_rep(prog.steps[i]);
    // step i+1 feeds block i+1 from block i; the last step wraps to block 0
    std::size_t row = (i + 1) % T;
    std::size_t col = i;
    for (std::size_t r = 0; r < m2; ++r)
      for (std::size_t c = 0; c < m2; ++c) a(row * m2 + r, col * m2 + c) = k(r, c);
  }
  return a;
}

ChannelProgram pad_program_for_unital(const ChannelProgram& prog, double eps,
                                      const UnitalPadding& padding) {
  if (prog.outcomes() != 2)
    throw Error(ErrorCode::InvalidProgram, "unital simulation expects two outcomes");
  const std::size_t m = prog.dim();
  // the 4/eps floor is honored only up to the configured cap; see the
  // UnitalPadding note on the cubic correction this floor guards against
  std::size_t floor_eps = std::size_t(std::ceil(4.0 / eps));
  if (padding.max_density_dim > 0) floor_eps = std::min(floor_eps, padding.max_density_dim);
  std::size_t target = std::max<std::size_t>({m, 8, floor_eps});
  // odd number of qubits so sqrt(m/8) is an integer
  std::size_t s_pad = log2_exact(next_pow2(target));
  if (s_pad % 2 == 0) ++s_pad;
  const std::size_t m_pad = std::size_t{1} << s_pad;
  if (!padding.auto_pad) {
    if (m_pad != m)
      throw Error(ErrorCode::PaddingRequired,
                  "program needs padding to dimension " + std::to_string(m_pad));
    return prog;
  }
  if (m_pad == m) return prog;

  const std::size_t f = m_pad / m;
  std::vector<ChannelStep> steps;
  steps.reserve(prog.T());
  CMatrix eye = CMatrix::identity(f);
  for (const auto& step : prog.steps) {
    std::vector<CMatrix> kraus;
    kraus.reserve(step.kraus.size());
    for (const auto& e : step.kraus) kraus.push_back(kron(e, eye));
    steps.emplace_back(std::move(kraus));
  }

  // dummy qubits start at |0>, so only the (x, dummy=0) diagonal carries the
  // original projector; filler on dummy != 0 brings M_0 to rank m_pad/2
  std::vector<std::uint8_t> m0(m_pad, 0), m1(m_pad, 0);
  std::size_t need = m_pad / 2;
  std::size_t have = rank_of(prog.measurement[0]);
  if (need < have)
    throw Error(ErrorCode::PaddingRequired, "cannot reduce projector rank by padding");
  for (std::size_t x = 0; x < m; ++x) m0[x * f] = prog.measurement[0][x];
  std::size_t filler = need - have;
  for (std::size_t idx = 0; idx < m_pad && filler > 0; ++idx) {
    if (idx % f == 0) continue;  // dummy = 0 slice is reserved for the original
    m0[idx] = 1;
    --filler;
  }
  for (std::size_t idx = 0; idx < m_pad; ++idx) m1[idx] = m0[idx] ? 0 : 1;
  return ChannelProgram(s_pad, std::move(steps), {std::move(m0), std::move(m1)});
}

UnitalReduction build_unital_reduction(const ChannelProgram& prog, double eps,
                                       const UnitalPadding& padding) {
  ChannelProgram padded = pad_program_for_unital(prog, eps, padding);
  if (!padded.all_unital()) throw Error(ErrorCode::NotUnital, "reduction needs unital steps");
  const std::size_t m = padded.dim();
  const std::size_t m2 = m * m;
  const std::size_t T = padded.T();

  CMatrix a = block_matrix(padded);
  CVector v(m2 * T), w(m2 * T);
  // vec(rho_0) for rho_0 = |0><0| has a single 1; vec(M_0) marks the diagonal
  v[0] = 1.0;
  const double scale = std::sqrt(2.0 / double(m));
  for (std::size_t x = 0; x < m; ++x)
    if (padded.measurement[0][x]) w[x + x * m] = scale;

  const double eps1 = eps * eps / (8.0 * double(m));
  UnitalReduction red{PoweringInstance(std::move(a), T, std::move(v), std::move(w), eps1),
                      m, 0, scale};
  red.grover_rounds = std::size_t(std::llround(std::sqrt(double(m) / 8.0)));
  return red;
}

UnitalSimResult simulate_unital(const ChannelProgram& prog, double eps, PoweringMode mode,
                                const UnitalPadding& padding, const PoweringLimits& limits) {
  UnitalReduction red = build_unital_reduction(prog, eps, padding);

  PoweringInstance run_inst = red.instance;
  if (mode == PoweringMode::Circuit) {
    // the rotation-angle analysis needs amplitude accuracy sqrt(eps1), not
    // probability accuracy eps1; budget the steps against the amplitude
    run_inst = PoweringInstance(red.instance.A, red.instance.T, red.instance.v,
                                red.instance.w, std::sqrt(red.instance.eps));
  }
  AmplifiedResult amp = amplified_prob(run_inst, red.grover_rounds, mode, limits);

  UnitalSimResult out;
  out.sin2_value = amp.prob_orthogonal;
  out.m_padded = red.m_padded;
  out.grover_rounds = red.grover_rounds;
  // p + alpha < 1 + eps < pi/2, so the principal branch is exact
  out.p_hat = std::asin(std::sqrt(std::clamp(amp.prob_orthogonal, 0.0, 1.0)));
  out.eps_total = eps;
  return out;
}

std::vector<double> output_distribution(const ChannelProgram& prog, double eps,
                                        std::uint64_t seed, PoweringMode mode,
                                        const PoweringLimits& limits) {
  if (!prog.all_unital()) throw Error(ErrorCode::NotUnital, "reduction needs unital steps");
  if (prog.T() < 1) throw Error(ErrorCode::InvalidProgram, "need at least one step");
  const std::size_t m = prog.dim();
  const std::size_t m2 = m * m;
  const std::size_t r = prog.outcomes();
  const std::size_t T = prog.T();

  CMatrix a = block_matrix(prog);
  CVector v(m2 * T);
  v[0] = 1.0;

  const double bilinear_eps = eps * eps / std::pow(2.0 * double(m), 3.0);
  SeedStream seeds(seed);

  cvector_t entries(next_pow2(r), 0.0);
  for (std::size_t j = 0; j < r; ++j) {
    std::size_t mj = rank_of(prog.measurement[j]);
    if (mj == 0) continue;
    CVector w(m2 * T);
    const double scale = 1.0 / std::sqrt(double(mj));
    for (std::size_t x = 0; x < m; ++x)
      if (prog.measurement[j][x]) w[x + x * m] = scale;
    PoweringInstance inst(a, T, v, w, std::min(0.5, bilinear_eps));
    complex_t s = bilinear_value(inst, mode, seeds.stream("dist", j)(), limits);
    double tr = std::max(0.0, s.real() * std::sqrt(double(mj)));
    entries[j] = std::sqrt(tr);
  }

  // streamed preparation from the estimated entries; the resulting state is
  // exactly unit so the reported probabilities always sum to one
  auto coeffs = prep_coefficients_streamed(entries);
  RegisterLayout layout({{"q", entries.size()}});
  Circuit c(layout, {});
  for (auto& g : prep_gates(coeffs, "q")) c.append(std::move(g));
  StateVector statev = run(c, StateVector(layout));
  std::vector<double> probs(r, 0.0);
  for (std::size_t j = 0; j < r; ++j) probs[j] = std::norm(statev.amplitudes()[j]);
  return probs;
}

ChannelStep identity_step(std::size_t m) {
  return ChannelStep({CMatrix::identity(m)});
}

ChannelStep dephasing_step(std::size_t m) {
  std::vector<CMatrix> kraus;
  kraus.reserve(m);
  for (std::size_t x = 0; x < m; ++x) {
    CMatrix p(m, m);
    p(x, x) = 1.0;
    kraus.push_back(std::move(p));
  }
  return ChannelStep(std::move(kraus));
}

ChannelStep random_mixed_unitary_step(std::size_t m, std::size_t k, std::mt19937_64& rng) {
  std::vector<double> probs(k);
  double total = 0.0;
  std::uniform_real_distribution<double> u(0.1, 1.0);
  for (auto& p : probs) {
    p = u(rng);
    total += p;
  }
  std::vector<CMatrix> kraus;
  kraus.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    CMatrix e = random_unitary(m, rng);
    e *= complex_t(std::sqrt(probs[i] / total));
    kraus.push_back(std::move(e));
  }
  return ChannelStep(std::move(kraus));
}

ChannelStep amplitude_damping_step(double gamma) {
  CMatrix e0(2, 2), e1(2, 2);
  e0(0, 0) = 1.0;
  e0(1, 1) = std::sqrt(1.0 - gamma);
  e1(0, 1) = std::sqrt(gamma);
  return ChannelStep({std::move(e0), std::move(e1)});
}

ChannelProgram random_unital_program(std::size_t space, std::size_t T, std::size_t outcomes,
                                     std::mt19937_64& rng) {
  const std::size_t m = std::size_t{1} << space;
  std::vector<ChannelStep> steps;
  steps.reserve(T);
  std::uniform_int_distribution<int> pick(0, 3);
  for (std::size_t i = 0; i < T; ++i) {
    int kind = pick(rng);
    if (kind == 0)
      steps.push_back(dephasing_step(m));
    else
      steps.push_back(random_mixed_unitary_step(m, 1 + std::size_t(kind), rng));
  }
  // random balanced partition of the basis into outcomes
  std::vector<std::size_t> order(m);
  for (std::size_t x = 0; x < m; ++x) order[x] = x;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::uint8_t>> ms(outcomes, std::vector<std::uint8_t>(m, 0));
  for (std::size_t x = 0; x < m; ++x) ms[x % outcomes][order[x]] = 1;
  return ChannelProgram(space, std::move(steps), std::move(ms));
}

}  // namespace cpk
