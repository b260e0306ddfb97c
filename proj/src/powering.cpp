#include "cpk/powering.hpp"

#include <cmath>
#include <numbers>

#include "cpk/rng.hpp"
#include "cpk/synthesis.hpp"

namespace cpk {

namespace {

struct PaddedInstance {
  CMatrix a;      // power-of-two dimension, identity on padding
  CVector v, w;   // zero-extended
  std::size_t m = 0;
};

PaddedInstance pad_instance(const CMatrix& a, const CVector& v, const CVector& w) {
  const std::size_t m0 = a.rows();
  const std::size_t m = std::max<std::size_t>(2, next_pow2(m0));
  PaddedInstance out;
  out.m = m;
  out.a = CMatrix::identity(m);
  for (std::size_t i = 0; i < m0; ++i)
    for (std::size_t j = 0; j < m0; ++j) out.a(i, j) = a(i, j);
  out.v = CVector(m);
  out.w = CVector(m);
  for (std::size_t i = 0; i < m0; ++i) {
    out.v[i] = v[i];
    out.w[i] = w[i];
  }
  return out;
}

/// Counter rotation |0>->|0>, |2T-2>->|1>, |2T-1>->|2>, |i>->|i+2>;
/// identity for T = 1, where no junk needs shuffling.
std::vector<std::size_t> counter_images(std::size_t T) {
  std::vector<std::size_t> img(2 * T);
  for (std::size_t c = 0; c < 2 * T; ++c) img[c] = c;
  if (T >= 2) {
    img[0] = 0;
    img[2 * T - 2] = 1;
    img[2 * T - 1] = 2;
    for (std::size_t i = 1; i + 2 <= 2 * T - 1; ++i) img[i] = i + 2;
  }
  return img;
}

struct CircuitPlan {
  Circuit circuit;
  std::size_t slots = 1;
  bool has_slot = false;
  std::size_t m = 0;
  std::size_t n_est = 1;  // 1 in ideal mode
  std::size_t ell = 0;
  std::size_t step_gates = 0;      // ops per (encoding + rotation) repetition
  std::size_t prologue_gates = 0;  // preparation ops before the loop
};

CircuitPlan build_powering_circuit(const PoweringInstance& inst, PoweringMode mode,
                                   const PoweringLimits& limits) {
  if (inst.T > limits.max_T)
    throw Error(ErrorCode::DimensionTooLarge, "T exceeds cap " + std::to_string(limits.max_T));
  PaddedInstance pad = pad_instance(inst.A, inst.v, inst.w);

  CircuitPlan plan;
  plan.m = pad.m;
  plan.slots = (inst.T + 1) / 2;
  plan.has_slot = plan.slots >= 2;

  std::size_t ell = 0, n_est = 1;
  BlockEncoding be;
  if (mode == PoweringMode::Circuit) {
    if (pad.m > limits.max_m_circuit)
      throw Error(ErrorCode::DimensionTooLarge, "m exceeds circuit-mode cap");
    const double eps_step = inst.eps / double(2 * inst.T);
    ell = ell_for_powering_step(eps_step, limits);
    n_est = std::size_t{1} << ell;
    be = block_encoding_circuit_with_ell(pad.a, eps_step, ell, limits.max_total_dim);
  }
  plan.ell = ell;
  plan.n_est = n_est;

  std::size_t total = plan.slots * 4 * pad.m * n_est;
  if (total > limits.max_total_dim)
    throw Error(ErrorCode::DimensionTooLarge,
                "powering state dimension " + std::to_string(total));

  std::vector<RegisterLayout::Register> regs;
  if (plan.has_slot) regs.push_back({"slot", plan.slots});
  regs.push_back({"d0", 2});
  regs.push_back({"d1", 2});
  regs.push_back({"vec", pad.m});
  if (mode == PoweringMode::Circuit) regs.push_back({"est", n_est});
  RegisterLayout layout(std::move(regs), std::max(default_dim_cap(), total));
  Circuit c(layout, {});

  for (auto& g : prep_gates_exact(pad.v, "vec")) c.append(std::move(g));
  plan.prologue_gates = c.ops.size();

  // one repetition: encoding step, then the counter rotation
  std::vector<GateOp> step_ops;
  if (mode == PoweringMode::Ideal) {
    step_ops.push_back(GateOp::dense_shared(
        {"d0", "d1", "vec"}, std::make_shared<const CMatrix>(v_a_matrix(pad.a)), {}, false,
        /*validate=*/pad.m <= 64));
  } else {
    step_ops = be.circuit.ops;
  }
  if (inst.T >= 2) {
    auto images = counter_images(inst.T);
    const std::size_t cdim = plan.slots * 4;
    CMatrix perm(cdim, cdim);
    for (std::size_t c4 = 0; c4 < cdim; ++c4) {
      std::size_t to = c4 < 2 * inst.T ? images[c4] : c4;
      perm(to, c4) = 1.0;
    }
    std::vector<std::string> ctargets =
        plan.has_slot ? std::vector<std::string>{"slot", "d0", "d1"}
                      : std::vector<std::string>{"d0", "d1"};
    step_ops.push_back(GateOp::dense(std::move(ctargets), std::move(perm)));
  }
  plan.step_gates = step_ops.size();
  for (std::size_t rep = 0; rep < inst.T; ++rep)
    for (const auto& op : step_ops) c.append(op);

  Circuit wprep(layout, {});
  for (auto& g : prep_gates_exact(pad.w, "vec")) wprep.append(std::move(g));
  for (const auto& op : invert(wprep).ops) c.append(op);

  plan.circuit = std::move(c);
  return plan;
}

/// Probability mass grouped by embedded counter value c4 = idx / (m * n_est).
void counter_masses(const StateVector& s, std::size_t m, std::size_t n_est,
                    std::vector<double>& out) {
  const std::size_t block = m * n_est;
  const auto& amps = s.amplitudes();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t idx = 0; idx < amps.size(); ++idx) {
    double p = std::norm(amps[idx]);
    if (p != 0.0) out[idx / block] += p;
  }
}

}  // namespace

PoweringInstance::PoweringInstance(CMatrix a, std::size_t t, CVector v_, CVector w_,
                                   double eps_)
    : A(std::move(a)), T(t), v(std::move(v_)), w(std::move(w_)), eps(eps_) {
  if (!A.square()) throw Error(ErrorCode::DimensionMismatch, "A must be square");
  if (v.dim() != A.rows() || w.dim() != A.rows())
    throw Error(ErrorCode::DimensionMismatch, "v, w must match A's dimension");
  if (T < 1) throw Error(ErrorCode::InvalidArgument, "T >= 1 required");
  if (std::abs(v.norm() - 1.0) > tol::unit_norm || std::abs(w.norm() - 1.0) > tol::unit_norm)
    throw Error(ErrorCode::NotUnit, "v and w must be unit vectors");
  if (spectral_norm(A) > 1.0 + tol::contraction)
    throw Error(ErrorCode::NotContraction, "A is not a contraction");
  if (!(eps > 0.0) || eps >= 1.0)
    throw Error(ErrorCode::InvalidArgument, "eps must be in (0, 1)");
}

std::size_t ell_for_powering_step(double eps_step, const PoweringLimits& limits) {
  if (!(eps_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps_step must be positive");
  const double c = 1.9;
  double raw = 2.0 * std::log2(c / eps_step);
  std::size_t ell = raw <= 4.0 ? 4 : static_cast<std::size_t>(std::ceil(raw));
  return std::min(ell, limits.max_ell);
}

Circuit powering_circuit(const PoweringInstance& inst, PoweringMode mode,
                         const PoweringLimits& limits) {
  return build_powering_circuit(inst, mode, limits).circuit;
}

PoweringRun powering_prob(const PoweringInstance& inst, PoweringMode mode,
                          const PoweringLimits& limits) {
  CircuitPlan plan = build_powering_circuit(inst, mode, limits);
  const Circuit& c = plan.circuit;

  PoweringRun out;
  out.gate_count = c.ops.size();
  out.total_dim = c.layout.total_dim();
  out.ell = plan.ell;

  StateVector state(c.layout);
  std::size_t op = 0;
  for (; op < plan.prologue_gates; ++op) apply_gate_inplace(state, c.ops[op]);

  const std::size_t cdim = plan.slots * 4;
  std::vector<double> masses(cdim);
  for (std::size_t rep = 1; rep <= inst.T; ++rep) {
    counter_masses(state, plan.m, plan.n_est, masses);
    if (cdim > 1) out.max_mass_on_counter1 = std::max(out.max_mass_on_counter1, masses[1]);

    // the encoding segment of this repetition (everything except the rotation)
    std::size_t seg = plan.step_gates - (inst.T >= 2 ? 1 : 0);
    for (std::size_t k = 0; k < seg; ++k, ++op) apply_gate_inplace(state, c.ops[op]);

    counter_masses(state, plan.m, plan.n_est, masses);
    double forbidden = 0.0;
    for (std::size_t c4 = 0; c4 < cdim; ++c4)
      if (c4 >= 2 * rep || c4 >= 2 * inst.T) forbidden += masses[c4];
    out.max_forbidden_mass = std::max(out.max_forbidden_mass, forbidden);

    if (inst.T >= 2) apply_gate_inplace(state, c.ops[op++]);
  }
  for (; op < c.ops.size(); ++op) apply_gate_inplace(state, c.ops[op]);

  out.zero_amplitude = state.amplitudes()[0];
  out.prob = std::norm(out.zero_amplitude);
  return out;
}

AmplifiedResult amplified_prob(const PoweringInstance& inst, std::size_t grover_rounds,
                               PoweringMode mode, const PoweringLimits& limits) {
  CircuitPlan plan = build_powering_circuit(inst, mode, limits);
  StateVector u = run(plan.circuit, StateVector(plan.circuit.layout));

  AmplifiedResult res;
  res.run.gate_count = plan.circuit.ops.size();
  res.run.total_dim = plan.circuit.layout.total_dim();
  res.run.ell = plan.ell;
  res.run.zero_amplitude = u.amplitudes()[0];
  res.run.prob = std::norm(res.run.zero_amplitude);
  res.overlap = std::abs(u.amplitudes()[0]);

  const cvector_t& uu = u.amplitudes();
  cvector_t psi(uu.size());
  psi[0] = 1.0;
  for (std::size_t r = 0; r < grover_rounds; ++r) {
    psi[0] = -psi[0];
    complex_t overlap = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) overlap += std::conj(uu[i]) * psi[i];
    overlap *= 2.0;
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] -= overlap * uu[i];
  }
  res.prob_orthogonal = std::max(0.0, 1.0 - std::norm(psi[0]));
  return res;
}

NoisyProbOracle NoisyProbOracle::bounded(double truth, double accuracy, double delta,
                                         std::uint64_t seed) {
  NoisyProbOracle o;
  o.kind_ = Kind::BoundedUniform;
  o.truth_ = truth;
  o.accuracy_ = accuracy;
  o.delta_ = delta;
  o.rng_ = SeedStream(seed).stream("noisy-prob-oracle");
  return o;
}

NoisyProbOracle NoisyProbOracle::two_value(double p1, double p2, std::uint64_t seed) {
  NoisyProbOracle o;
  o.kind_ = Kind::TwoValue;
  o.p1_ = p1;
  o.p2_ = p2;
  o.accuracy_ = std::abs(p1 - p2);
  o.rng_ = SeedStream(seed).stream("two-value-oracle");
  return o;
}

NoisyProbOracle NoisyProbOracle::scripted(std::vector<double> values) {
  NoisyProbOracle o;
  o.kind_ = Kind::Scripted;
  o.script_ = std::move(values);
  return o;
}

double NoisyProbOracle::query() {
  switch (kind_) {
    case Kind::BoundedUniform: {
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      if (delta_ > 0.0 && unit(rng_) < delta_) return unit(rng_);
      std::uniform_real_distribution<double> noise(-accuracy_, accuracy_);
      return std::clamp(truth_ + noise(rng_), 0.0, 1.0);
    }
    case Kind::TwoValue: {
      std::uniform_int_distribution<int> pick(0, 1);
      return pick(rng_) ? p2_ : p1_;
    }
    case Kind::Scripted:
      if (script_pos_ >= script_.size())
        throw Error(ErrorCode::InvalidArgument, "scripted oracle exhausted");
      return script_[script_pos_++];
  }
  return 0.0;
}

std::size_t extract_bit_count(double eps) {
  if (!(eps > 0.0) || eps >= 1.0)
    throw Error(ErrorCode::InvalidArgument, "eps must be in (0, 1)");
  return static_cast<std::size_t>(std::ceil(std::log2(1.0 / eps))) + 2;
}

double extract_value(NoisyProbOracle& oracle, double eps) {
  const std::size_t bits = extract_bit_count(eps);
  double q = 0.0;
  for (std::size_t i = 1; i <= bits; ++i) {
    double pt = oracle.query();
    // the i-th bit of (pt - q), with out-of-range values clamped: negative
    // differences emit 0, differences >= 2^{-i+1} emit 1
    double step = std::ldexp(1.0, -int(i));
    if (pt - q >= step) q += step;
  }
  return q;
}

complex_t bilinear_combination(double p_z, double p_plus, double p_plus_i) {
  double re = 0.5 * (4.0 * p_plus - p_z - 1.0);
  double im = 0.5 * (4.0 * p_plus_i - p_z - 1.0);
  return {re, im};
}

complex_t bilinear_value(const PoweringInstance& inst, PoweringMode mode, std::uint64_t seed,
                         const PoweringLimits& limits) {
  const std::size_t m = inst.A.rows();
  const double eps_int = inst.eps / 4.0;

  // A1 = A (+) 1 padded to a power of two with identity-fixed extra dims;
  // v1, w1 put the anchor at index m, off the padding
  const std::size_t m1 = next_pow2(m + 1);
  CMatrix a1 = CMatrix::identity(m1);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) a1(i, j) = inst.A(i, j);
  const double s = 1.0 / std::sqrt(2.0);
  CVector v1(m1), v1i(m1), w1(m1);
  for (std::size_t i = 0; i < m; ++i) {
    v1[i] = inst.v[i] * s;
    v1i[i] = inst.v[i] * s;
    w1[i] = inst.w[i] * s;
  }
  v1[m] = s;
  v1i[m] = complex_t(0.0, s);
  w1[m] = s;

  SeedStream seeds(seed);
  auto estimate = [&](const CMatrix& a, const CVector& vv, const CVector& ww,
                      const std::string& tag) {
    PoweringInstance aux(a, inst.T, vv, ww, eps_int / 2.0);
    PoweringRun r = powering_prob(aux, mode, limits);
    auto rng = seeds.stream("bilinear-" + tag);
    NoisyProbOracle oracle =
        NoisyProbOracle::bounded(r.prob, eps_int / 4.0, 0.0, rng());
    return extract_value(oracle, eps_int);
  };

  double p_z = estimate(inst.A, inst.v, inst.w, "z");
  double p_plus = estimate(a1, v1, w1, "plus");
  double p_plus_i = estimate(a1, v1i, w1, "plus-i");
  return bilinear_combination(p_z, p_plus, p_plus_i);
}

double spectral_norm_estimate(const CMatrix& a, double eps1, std::uint64_t seed) {
  double fro = frobenius_norm(a);
  if (fro == 0.0) throw Error(ErrorCode::ZeroMatrix, "norm estimate of the zero matrix");
  double exact = spectral_norm(a) / fro;
  if (eps1 == 0.0) return exact;
  auto rng = SeedStream(seed).stream("spectral-norm-estimate");
  std::uniform_real_distribution<double> noise(-eps1, eps1);
  return exact + noise(rng);
}

GeneralPowerResult general_power(const CMatrix& a, std::size_t T, const CVector& v,
                                 const CVector& w, double eps, std::uint64_t seed,
                                 PoweringMode mode, const PoweringLimits& limits) {
  if (!a.square()) throw Error(ErrorCode::DimensionMismatch, "A must be square");
  const double m = double(a.rows());
  const double eps1 = 1.0 / (3.0 * double(T) * std::sqrt(m));
  double sigma = spectral_norm_estimate(a, eps1, seed);
  double alpha = sigma * frobenius_norm(a) / (1.0 - std::sqrt(m) * eps1);

  CMatrix scaled = a;
  scaled *= complex_t(1.0 / alpha);
  PoweringInstance inst(std::move(scaled), T, v, w, eps / 3.0);
  complex_t z = bilinear_value(inst, mode, seed + 1, limits);
  double boost = std::pow(alpha, double(T));
  return GeneralPowerResult{z * complex_t(boost), alpha};
}

}  // namespace cpk
