#include "cpk/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace cpk {

Permutation::Permutation(std::size_t m_, std::vector<std::size_t> images_)
    : m(m_), images(std::move(images_)) {
  if (images.size() != m)
    throw Error(ErrorCode::InvalidArgument, "permutation image count != m");
  std::vector<bool> seen(m + 1, false);
  for (std::size_t v : images) {
    if (v < 1 || v > m || seen[v])
      throw Error(ErrorCode::InvalidArgument, "images not a bijection of {1..m}");
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t m) {
  std::vector<std::size_t> im(m);
  for (std::size_t i = 0; i < m; ++i) im[i] = i + 1;
  return Permutation(m, std::move(im));
}

CMatrix Permutation::matrix() const {
  CMatrix p(m, m);
  for (std::size_t i = 1; i <= m; ++i) p(apply(i) - 1, i - 1) = 1.0;
  return p;
}

std::vector<std::size_t> tau(const Permutation& sigma) {
  std::vector<std::size_t> out(sigma.m);
  for (std::size_t i = 1; i <= sigma.m; ++i) {
    // first element of the forward orbit of i that is >= i; the orbit returns
    // to i, so the walk terminates within m steps
    std::size_t cur = sigma.apply(i);
    while (cur < i) cur = sigma.apply(cur);
    out[i - 1] = cur;
  }
  return out;
}

std::vector<Transposition> decompose(const Permutation& sigma) {
  std::vector<std::size_t> t = tau(sigma);
  std::vector<Transposition> out(sigma.m);
  for (std::size_t i = 1; i <= sigma.m; ++i)
    out[i - 1] = Transposition{i, t[i - 1]};
  return out;
}

Permutation compose_transpositions(std::size_t m, const std::vector<Transposition>& ts) {
  std::vector<std::size_t> im(m);
  for (std::size_t x = 1; x <= m; ++x) {
    std::size_t cur = x;
    for (auto it = ts.rbegin(); it != ts.rend(); ++it) {  // rightmost applied first
      if (cur == it->a)
        cur = it->b;
      else if (cur == it->b)
        cur = it->a;
    }
    im[x - 1] = cur;
  }
  return Permutation(m, std::move(im));
}

Circuit perm_circuit(const Permutation& sigma, std::size_t dim) {
  if (sigma.m > dim)
    throw Error(ErrorCode::DimensionMismatch, "permutation ground set exceeds register dim");
  RegisterLayout layout({{"q", dim}});
  Circuit c(layout, {});
  auto ts = decompose(sigma);
  for (auto it = ts.rbegin(); it != ts.rend(); ++it) {
    if (it->a == it->b) continue;  // identity factor
    c.append(GateOp::two_level("q", it->a - 1, it->b - 1, 0.0, 1.0, 1.0, 0.0));
  }
  return c;
}

std::vector<complex_t> prep_coefficients_streamed(const cvector_t& entries) {
  const std::size_t m = entries.size();
  std::vector<complex_t> a;
  a.reserve(m > 0 ? m - 1 : 0);
  double tail = 1.0;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    if (tail <= tol::tail) {
      a.push_back(1.0);
    } else {
      complex_t ai = entries[i] / std::sqrt(tail);
      if (std::abs(ai) > 1.0) ai /= std::abs(ai);  // estimates may overshoot the tail
      a.push_back(ai);
    }
    tail -= std::norm(entries[i]);
    if (tail < 0.0) tail = 0.0;
  }
  return a;
}

namespace {

struct PrepPlan {
  std::vector<complex_t> a;  // diagonal coefficients
  std::vector<double> s;     // off-diagonal magnitudes sqrt(tail_{i+1}/tail_i)
  complex_t last_phase = 1.0;
};

// Tail sums accumulated backward, so a zero tail is exactly zero and the
// degenerate-coefficient rule fires without cancellation noise.
PrepPlan build_plan(const cvector_t& v) {
  const std::size_t m = v.size();
  std::vector<double> tails(m + 1, 0.0);
  for (std::size_t i = m; i-- > 0;) tails[i] = tails[i + 1] + std::norm(v[i]);
  PrepPlan plan;
  plan.a.reserve(m > 0 ? m - 1 : 0);
  plan.s.reserve(m > 0 ? m - 1 : 0);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    if (tails[i] <= tol::tail) {
      plan.a.push_back(1.0);
      plan.s.push_back(0.0);
    } else {
      plan.a.push_back(v[i] / std::sqrt(tails[i]));
      plan.s.push_back(std::sqrt(tails[i + 1] / tails[i]));
    }
  }
  if (m > 0 && std::abs(v[m - 1]) > 0.0) plan.last_phase = v[m - 1] / std::abs(v[m - 1]);
  return plan;
}

}  // namespace

std::vector<complex_t> prep_coefficients(const CVector& v, double tol_unit) {
  if (std::abs(v.norm() - 1.0) > tol_unit)
    throw Error(ErrorCode::NotUnit, "prep input norm " + std::to_string(v.norm()));
  return build_plan(v.data()).a;
}

std::vector<GateOp> prep_gates(const std::vector<complex_t>& coeffs, const std::string& reg) {
  std::vector<GateOp> gates;
  gates.reserve(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    complex_t a = coeffs[i];
    double s = std::sqrt(std::max(0.0, 1.0 - std::norm(a)));
    // reflection completion -conj(a); the cascade only uses column zero
    gates.push_back(GateOp::two_level(reg, i, i + 1, a, s, s, -std::conj(a)));
  }
  return gates;
}

std::vector<GateOp> prep_gates_exact(const CVector& v, const std::string& reg) {
  PrepPlan plan = build_plan(v.data());
  std::vector<GateOp> gates;
  gates.reserve(plan.a.size());
  for (std::size_t i = 0; i < plan.a.size(); ++i) {
    complex_t a = plan.a[i];
    // the last step's b carries the phase of the final amplitude; every
    // earlier step only ever sees a zero in its upper level
    complex_t b = (i + 1 == plan.a.size()) ? plan.last_phase * plan.s[i] : complex_t(plan.s[i]);
    gates.push_back(GateOp::two_level(reg, i, i + 1, a, std::conj(b), b, -std::conj(a)));
  }
  return gates;
}

Circuit prep_circuit(const CVector& v, double tol_unit) {
  if (!is_pow2(v.dim()))
    throw Error(ErrorCode::NotPowerOfTwo, "prep dimension " + std::to_string(v.dim()));
  if (std::abs(v.norm() - 1.0) > tol_unit)
    throw Error(ErrorCode::NotUnit, "prep input norm " + std::to_string(v.norm()));
  RegisterLayout layout({{"q", v.dim()}});
  Circuit c(layout, {});
  for (auto& g : prep_gates_exact(v, "q")) c.append(std::move(g));
  return c;
}

}  // namespace cpk
