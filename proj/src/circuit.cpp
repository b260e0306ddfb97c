#include "cpk/circuit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <set>

namespace cpk {

RegisterLayout::RegisterLayout(std::vector<Register> regs, std::size_t dim_cap)
    : regs_(std::move(regs)) {
  std::set<std::string> names;
  total_ = 1;
  for (const auto& r : regs_) {
    if (r.dim < 2)
      throw Error(ErrorCode::InvalidArgument, "register '" + r.name + "' has dim < 2");
    if (!names.insert(r.name).second)
      throw Error(ErrorCode::InvalidArgument, "duplicate register '" + r.name + "'");
    if (total_ > dim_cap / r.dim)
      throw Error(ErrorCode::DimensionTooLarge,
                  "total dimension exceeds cap " + std::to_string(dim_cap));
    total_ *= r.dim;
  }
  strides_.assign(regs_.size(), 1);
  for (std::size_t i = regs_.size(); i-- > 1;)
    strides_[i - 1] = strides_[i] * regs_[i].dim;
}

std::size_t RegisterLayout::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < regs_.size(); ++i)
    if (regs_[i].name == name) return i;
  throw Error(ErrorCode::LayoutMismatch, "no register named '" + name + "'");
}

bool RegisterLayout::operator==(const RegisterLayout& other) const {
  if (regs_.size() != other.regs_.size()) return false;
  for (std::size_t i = 0; i < regs_.size(); ++i)
    if (regs_[i].name != other.regs_[i].name || regs_[i].dim != other.regs_[i].dim)
      return false;
  return true;
}

namespace {

void check_dense_unitary(const CMatrix& m) {
  if (!m.square()) throw Error(ErrorCode::NotUnitary, "gate matrix not square");
  const std::size_t n = m.rows();
  if (n <= 512) {
    // Frobenius norm of M'M - I bounds the spectral norm from above.
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        complex_t s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += std::conj(m(k, i)) * m(k, j);
        if (i == j) s -= 1.0;
        acc += std::norm(s);
      }
    if (std::sqrt(acc) > tol::unitary * std::sqrt(double(n)) + tol::unitary)
      throw Error(ErrorCode::NotUnitary, "gate matrix fails unitarity check");
  } else {
    // spot check: column norms and a few orthogonality pairs
    for (std::size_t j = 0; j < n; j += std::max<std::size_t>(1, n / 16)) {
      double cn = 0.0;
      for (std::size_t i = 0; i < n; ++i) cn += std::norm(m(i, j));
      if (std::abs(std::sqrt(cn) - 1.0) > 1e-8)
        throw Error(ErrorCode::NotUnitary, "gate matrix column norm off");
    }
  }
}

}  // namespace

GateOp GateOp::dense(std::vector<std::string> targets, CMatrix m,
                     std::vector<Control> controls) {
  return dense_shared(std::move(targets), std::make_shared<const CMatrix>(std::move(m)),
                      std::move(controls));
}

GateOp GateOp::dense_shared(std::vector<std::string> targets,
                            std::shared_ptr<const CMatrix> m,
                            std::vector<Control> controls, bool adjoint, bool validate) {
  if (validate) check_dense_unitary(*m);
  GateOp op;
  op.kind = Kind::Dense;
  op.targets = std::move(targets);
  op.controls = std::move(controls);
  op.matrix = std::move(m);
  op.adjoint = adjoint;
  return op;
}

GateOp GateOp::two_level(std::string target, std::size_t a, std::size_t b,
                         complex_t m00, complex_t m01, complex_t m10, complex_t m11,
                         std::vector<Control> controls) {
  // 2x2 unitarity
  double r0 = std::norm(m00) + std::norm(m10);
  double r1 = std::norm(m01) + std::norm(m11);
  complex_t dot = std::conj(m00) * m01 + std::conj(m10) * m11;
  if (std::abs(r0 - 1.0) > 1e-9 || std::abs(r1 - 1.0) > 1e-9 || std::abs(dot) > 1e-9)
    throw Error(ErrorCode::NotUnitary, "two-level block not unitary");
  GateOp op;
  op.kind = Kind::TwoLevel;
  op.targets = {std::move(target)};
  op.controls = std::move(controls);
  op.level_a = a;
  op.level_b = b;
  op.tl[0] = m00;
  op.tl[1] = m01;
  op.tl[2] = m10;
  op.tl[3] = m11;
  return op;
}

GateOp GateOp::fourier(std::string target, bool inverse, std::vector<Control> controls) {
  GateOp op;
  op.kind = Kind::Fourier;
  op.targets = {std::move(target)};
  op.controls = std::move(controls);
  op.fourier_inverse = inverse;
  return op;
}

GateOp GateOp::phase_ladder(std::vector<std::string> targets,
                            std::shared_ptr<const std::vector<double>> angles, bool adjoint) {
  GateOp op;
  op.kind = Kind::PhaseLadder;
  op.targets = std::move(targets);
  op.angles = std::move(angles);
  op.adjoint = adjoint;
  return op;
}

GateOp GateOp::adjoint_op() const {
  GateOp out = *this;
  switch (kind) {
    case Kind::Dense:
    case Kind::PhaseLadder:
      out.adjoint = !adjoint;
      break;
    case Kind::TwoLevel:
      out.tl[0] = std::conj(tl[0]);
      out.tl[1] = std::conj(tl[2]);
      out.tl[2] = std::conj(tl[1]);
      out.tl[3] = std::conj(tl[3]);
      break;
    case Kind::Fourier:
      out.fourier_inverse = !fourier_inverse;
      break;
  }
  return out;
}

Circuit::Circuit(RegisterLayout l, std::vector<GateOp> o) : layout(std::move(l)) {
  for (auto& op : o) append(std::move(op));
}

void Circuit::validate_op(const GateOp& op) const {
  std::set<std::string> seen;
  std::size_t dt = 1;
  for (const auto& t : op.targets) {
    std::size_t i = layout.index_of(t);
    if (!seen.insert(t).second)
      throw Error(ErrorCode::LayoutMismatch, "repeated target '" + t + "'");
    dt *= layout.dim(i);
  }
  for (const auto& c : op.controls) {
    std::size_t i = layout.index_of(c.reg);
    if (seen.count(c.reg))
      throw Error(ErrorCode::LayoutMismatch, "control overlaps target '" + c.reg + "'");
    if (c.value >= layout.dim(i))
      throw Error(ErrorCode::LayoutMismatch, "control value out of range on '" + c.reg + "'");
  }
  switch (op.kind) {
    case GateOp::Kind::Dense:
      if (!op.matrix || op.matrix->rows() != dt)
        throw Error(ErrorCode::LayoutMismatch, "dense gate dim != product of target dims");
      break;
    case GateOp::Kind::TwoLevel: {
      if (op.targets.size() != 1)
        throw Error(ErrorCode::LayoutMismatch, "two-level gate needs one target");
      std::size_t d = layout.dim(layout.index_of(op.targets[0]));
      if (op.level_a >= d || op.level_b >= d || op.level_a == op.level_b)
        throw Error(ErrorCode::LayoutMismatch, "two-level indices out of range");
      break;
    }
    case GateOp::Kind::Fourier: {
      if (op.targets.size() != 1)
        throw Error(ErrorCode::LayoutMismatch, "fourier gate needs one target");
      std::size_t d = layout.dim(layout.index_of(op.targets[0]));
      if (!is_pow2(d))
        throw Error(ErrorCode::NotPowerOfTwo, "fourier register dim " + std::to_string(d));
      break;
    }
    case GateOp::Kind::PhaseLadder: {
      if (op.targets.size() < 2)
        throw Error(ErrorCode::LayoutMismatch, "phase ladder needs system and ladder targets");
      std::size_t sysdim = dt / layout.dim(layout.index_of(op.targets.back()));
      if (!op.angles || op.angles->size() != sysdim)
        throw Error(ErrorCode::LayoutMismatch, "phase ladder angle table mismatch");
      break;
    }
  }
}

void Circuit::append(GateOp op) {
  validate_op(op);
  ops.push_back(std::move(op));
}

StateVector::StateVector(RegisterLayout layout)
    : layout_(std::move(layout)), amps_(layout_.total_dim()) {
  amps_[0] = 1.0;
}

StateVector::StateVector(RegisterLayout layout, cvector_t amps, double tolerance)
    : layout_(std::move(layout)), amps_(std::move(amps)) {
  if (amps_.size() != layout_.total_dim())
    throw Error(ErrorCode::LayoutMismatch, "amplitude count != total dimension");
  double n = norm();
  if (std::abs(n - 1.0) > tolerance)
    throw Error(ErrorCode::InvalidState, "state norm " + std::to_string(n));
}

StateVector StateVector::basis(
    RegisterLayout layout, const std::vector<std::pair<std::string, std::size_t>>& values) {
  std::size_t idx = 0;
  for (const auto& [name, val] : values) {
    std::size_t r = layout.index_of(name);
    if (val >= layout.dim(r))
      throw Error(ErrorCode::LayoutMismatch, "basis value out of range on '" + name + "'");
    idx += val * layout.stride(r);
  }
  StateVector s(layout);
  s.amps_[0] = 0.0;
  s.amps_[idx] = 1.0;
  return s;
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& z : amps_) s += std::norm(z);
  return std::sqrt(s);
}

namespace {

/// Twiddle table for length n: exp(-2*pi*i*k/n), k < n/2.
const std::vector<complex_t>& twiddles(std::size_t n) {
  thread_local std::vector<std::vector<complex_t>> cache;  // indexed by log2(n)
  std::size_t lg = 0;
  while ((std::size_t{1} << lg) < n) ++lg;
  if (cache.size() <= lg) cache.resize(lg + 1);
  auto& tw = cache[lg];
  if (tw.empty()) {
    tw.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
      double ang = -2.0 * std::numbers::pi * double(k) / double(n);
      tw[k] = complex_t(std::cos(ang), std::sin(ang));
    }
  }
  return tw;
}

/// Unnormalized radix-2 FFT on a contiguous buffer.
/// sign = -1: X[j] = sum_y x[y] exp(-2*pi*i*j*y/N); sign = +1: conjugate kernel.
void fft_pow2(complex_t* data, std::size_t n, int sign) {
  if (n < 2) return;
  const std::vector<complex_t>& tw = twiddles(n);
  // bit reversal
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  // len = 2 stage has no twiddles
  for (std::size_t i = 0; i < n; i += 2) {
    complex_t u = data[i], v = data[i + 1];
    data[i] = u + v;
    data[i + 1] = u - v;
  }
  for (std::size_t len = 4; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t tstep = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      complex_t* lo = data + i;
      complex_t* hi = data + i + half;
      for (std::size_t k = 0; k < half; ++k) {
        complex_t w = tw[k * tstep];
        if (sign > 0) w = std::conj(w);
        complex_t u = lo[k];
        complex_t v = hi[k] * w;
        lo[k] = u + v;
        hi[k] = u - v;
      }
    }
  }
}

constexpr std::size_t kMaxRegs = 12;

struct Resolved {
  std::array<std::size_t, kMaxRegs> target_stride;
  std::array<std::size_t, kMaxRegs> target_dim;
  std::size_t n_targets = 0;
  std::size_t dt = 1;
  std::size_t base_fixed = 0;  // from controls
  std::array<std::size_t, kMaxRegs> free_stride, free_dim;
  std::size_t n_free = 0;
};

void resolve(const RegisterLayout& layout, const GateOp& op, Resolved& r) {
  if (layout.size() > kMaxRegs)
    throw Error(ErrorCode::DimensionTooLarge, "too many registers");
  std::array<bool, kMaxRegs> used{};
  r.n_targets = 0;
  r.dt = 1;
  r.base_fixed = 0;
  r.n_free = 0;
  for (const auto& t : op.targets) {
    std::size_t i = layout.index_of(t);
    used[i] = true;
    r.target_stride[r.n_targets] = layout.stride(i);
    r.target_dim[r.n_targets] = layout.dim(i);
    ++r.n_targets;
    r.dt *= layout.dim(i);
  }
  for (const auto& c : op.controls) {
    std::size_t i = layout.index_of(c.reg);
    used[i] = true;
    r.base_fixed += c.value * layout.stride(i);
  }
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (!used[i]) {
      r.free_stride[r.n_free] = layout.stride(i);
      r.free_dim[r.n_free] = layout.dim(i);
      ++r.n_free;
    }
  }
}

/// Offsets of the dt target basis states, first target most significant.
void target_offsets(const Resolved& r, std::vector<std::size_t>& offs) {
  offs.assign(r.dt, 0);
  std::size_t repeat = r.dt;
  for (std::size_t t = 0; t < r.n_targets; ++t) {
    repeat /= r.target_dim[t];
    for (std::size_t i = 0; i < r.dt; ++i) {
      std::size_t v = (i / repeat) % r.target_dim[t];
      offs[i] += v * r.target_stride[t];
    }
  }
}

template <typename Body>
void for_each_free(const Resolved& r, Body&& body) {
  const std::size_t axes = r.n_free;
  std::array<std::size_t, kMaxRegs> ctr{};
  while (true) {
    std::size_t base = r.base_fixed;
    for (std::size_t a = 0; a < axes; ++a) base += ctr[a] * r.free_stride[a];
    body(base);
    std::size_t a = axes;
    while (a > 0) {
      --a;
      if (++ctr[a] < r.free_dim[a]) break;
      ctr[a] = 0;
      if (a == 0) return;
    }
    if (axes == 0) return;
  }
}

}  // namespace

void apply_gate_inplace(StateVector& state, const GateOp& op) {
  const RegisterLayout& layout = state.layout();
  Resolved r;
  resolve(layout, op, r);
  complex_t* amps = state.amplitudes().data();

  switch (op.kind) {
    case GateOp::Kind::TwoLevel: {
      const std::size_t sa = op.level_a * r.target_stride[0];
      const std::size_t sb = op.level_b * r.target_stride[0];
      const complex_t m00 = op.tl[0], m01 = op.tl[1], m10 = op.tl[2], m11 = op.tl[3];
      for_each_free(r, [&](std::size_t base) {
        complex_t xa = amps[base + sa];
        complex_t xb = amps[base + sb];
        amps[base + sa] = m00 * xa + m01 * xb;
        amps[base + sb] = m10 * xa + m11 * xb;
      });
      break;
    }
    case GateOp::Kind::PhaseLadder: {
      const auto& ang = *op.angles;
      const double sign = op.adjoint ? -1.0 : 1.0;
      const std::size_t ldim = r.target_dim[r.n_targets - 1];
      const std::size_t lstride = r.target_stride[r.n_targets - 1];
      Resolved sys = r;
      sys.n_targets -= 1;
      sys.dt = r.dt / ldim;
      thread_local std::vector<std::size_t> soffs;
      target_offsets(sys, soffs);
      for_each_free(r, [&](std::size_t base) {
        for (std::size_t k = 0; k < sys.dt; ++k) {
          complex_t* p = amps + base + soffs[k];
          const double a = sign * ang[k];
          const complex_t w = std::polar(1.0, a);
          complex_t cur = 1.0;
          for (std::size_t j = 0; j < ldim; ++j) {
            p[j * lstride] *= cur;
            // periodic exact restart keeps the incremental phase from drifting
            cur = (j & 4095) == 4095 ? std::polar(1.0, a * double(j + 1)) : cur * w;
          }
        }
      });
      break;
    }
    case GateOp::Kind::Fourier: {
      const std::size_t n = r.target_dim[0];
      const std::size_t stride = r.target_stride[0];
      const double scale = 1.0 / std::sqrt(double(n));
      const int sign = op.fourier_inverse ? -1 : +1;
      std::vector<complex_t> scratch;
      if (stride != 1) scratch.resize(n);
      for_each_free(r, [&](std::size_t base) {
        if (stride == 1) {
          fft_pow2(amps + base, n, sign);
          for (std::size_t k = 0; k < n; ++k) amps[base + k] *= scale;
        } else {
          for (std::size_t k = 0; k < n; ++k) scratch[k] = amps[base + k * stride];
          fft_pow2(scratch.data(), n, sign);
          for (std::size_t k = 0; k < n; ++k) amps[base + k * stride] = scratch[k] * scale;
        }
      });
      break;
    }
    case GateOp::Kind::Dense: {
      const CMatrix& m = *op.matrix;
      const bool adj = op.adjoint;
      thread_local std::vector<std::size_t> offs;
      thread_local std::vector<complex_t> x, y;
      target_offsets(r, offs);
      x.resize(r.dt);
      y.resize(r.dt);
      const bool contiguous = [&] {
        for (std::size_t i = 0; i < r.dt; ++i)
          if (offs[i] != i) return false;
        return true;
      }();
      // strided targets over a long contiguous free axis: process that axis
      // as a block of columns per matrix row, keeping the sweep vectorizable
      if (!contiguous && r.n_free > 0 && r.free_stride[r.n_free - 1] == 1 &&
          r.free_dim[r.n_free - 1] >= 16) {
        const std::size_t B = r.free_dim[r.n_free - 1];
        thread_local std::vector<complex_t> rows;
        rows.resize(r.dt * B);
        Resolved outer = r;
        outer.n_free -= 1;
        for_each_free(outer, [&](std::size_t base) {
          for (std::size_t i = 0; i < r.dt; ++i)
            std::copy_n(amps + base + offs[i], B, rows.data() + i * B);
          for (std::size_t i = 0; i < r.dt; ++i) {
            complex_t* out = amps + base + offs[i];
            std::fill_n(out, B, complex_t{});
            for (std::size_t j = 0; j < r.dt; ++j) {
              complex_t mij = adj ? std::conj(m(j, i)) : m(i, j);
              if (mij == complex_t{}) continue;
              const complex_t* src = rows.data() + j * B;
              for (std::size_t b = 0; b < B; ++b) out[b] += mij * src[b];
            }
          }
        });
        break;
      }
      for_each_free(r, [&](std::size_t base) {
        const complex_t* src = contiguous ? amps + base : x.data();
        if (!contiguous)
          for (std::size_t i = 0; i < r.dt; ++i) x[i] = amps[base + offs[i]];
        if (!adj) {
          for (std::size_t i = 0; i < r.dt; ++i) {
            complex_t acc = 0.0;
            const complex_t* row = &m.data()[i * r.dt];
            for (std::size_t j = 0; j < r.dt; ++j) acc += row[j] * src[j];
            y[i] = acc;
          }
        } else {
          for (std::size_t i = 0; i < r.dt; ++i) y[i] = 0.0;
          for (std::size_t j = 0; j < r.dt; ++j) {
            const complex_t* row = &m.data()[j * r.dt];
            const complex_t xj = src[j];
            for (std::size_t i = 0; i < r.dt; ++i) y[i] += std::conj(row[i]) * xj;
          }
        }
        if (contiguous) {
          for (std::size_t i = 0; i < r.dt; ++i) amps[base + i] = y[i];
        } else {
          for (std::size_t i = 0; i < r.dt; ++i) amps[base + offs[i]] = y[i];
        }
      });
      break;
    }
  }
}

StateVector apply_gate(const StateVector& state, const GateOp& op) {
  Circuit probe(state.layout(), {});
  probe.validate_op(op);
  StateVector out = state;
  apply_gate_inplace(out, op);
  return out;
}

StateVector run(const Circuit& circuit, const StateVector& initial) {
  if (!(circuit.layout == initial.layout()))
    throw Error(ErrorCode::LayoutMismatch, "circuit and state layouts differ");
  StateVector out = initial;
  for (const auto& op : circuit.ops) apply_gate_inplace(out, op);
  return out;
}

Circuit invert(const Circuit& circuit) {
  Circuit out;
  out.layout = circuit.layout;
  out.ops.reserve(circuit.ops.size());
  for (auto it = circuit.ops.rbegin(); it != circuit.ops.rend(); ++it)
    out.ops.push_back(it->adjoint_op());
  return out;
}

double projection_prob(const StateVector& state,
                       const std::vector<std::pair<std::string, std::size_t>>& pattern) {
  const RegisterLayout& layout = state.layout();
  std::vector<std::pair<std::size_t, std::size_t>> pins;  // (reg index, value)
  for (const auto& [name, val] : pattern) {
    std::size_t i = layout.index_of(name);
    if (val >= layout.dim(i))
      throw Error(ErrorCode::LayoutMismatch, "pattern value out of range on '" + name + "'");
    pins.emplace_back(i, val);
  }
  double prob = 0.0;
  const auto& amps = state.amplitudes();
  for (std::size_t idx = 0; idx < amps.size(); ++idx) {
    bool match = true;
    for (const auto& [ri, val] : pins) {
      if ((idx / layout.stride(ri)) % layout.dim(ri) != val) {
        match = false;
        break;
      }
    }
    if (match) prob += std::norm(amps[idx]);
  }
  return prob;
}

CMatrix circuit_unitary(const Circuit& circuit) {
  const std::size_t n = circuit.layout.total_dim();
  if (n > (std::size_t{1} << 12))
    throw Error(ErrorCode::DimensionTooLarge, "circuit_unitary limited to 2^12");
  CMatrix u(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    StateVector s(circuit.layout);
    s.amplitudes()[0] = 0.0;
    s.amplitudes()[col] = 1.0;
    for (const auto& op : circuit.ops) apply_gate_inplace(s, op);
    for (std::size_t row = 0; row < n; ++row) u(row, col) = s.amplitudes()[row];
  }
  return u;
}

}  // namespace cpk
