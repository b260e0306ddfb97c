#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpk {

using complex_t = std::complex<double>;
using cvector_t = std::vector<complex_t>;

/// Default numeric tolerances. All of them can be overridden per call where
/// an operation takes an explicit tolerance argument.
namespace tol {
inline constexpr double unitary = 1e-9;
inline constexpr double reconstruct = 1e-9;
inline constexpr double hermitian = 1e-10;
inline constexpr double contraction = 1e-9;
inline constexpr double unit_norm = 1e-9;
inline constexpr double tail = 1e-14;
}  // namespace tol

enum class ErrorCode {
  NotHermitian,
  NotContraction,
  NotUnitary,
  NotUnit,
  NotPowerOfTwo,
  NotUnital,
  LayoutMismatch,
  DimensionTooLarge,
  DimensionMismatch,
  InvalidKraus,
  InvalidState,
  InvalidProgram,
  ZeroMatrix,
  PaddingRequired,
  GapViolation,
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Simulator dimension cap. Reads CPK_DIM_CAP from the environment once at
/// startup; defaults to 2^16. Modules that knowingly build larger spaces pass
/// an explicit cap when constructing their layouts.
std::size_t default_dim_cap();
void set_default_dim_cap(std::size_t cap);

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

inline std::size_t log2_exact(std::size_t n) {
  std::size_t k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  if ((std::size_t{1} << k) != n)
    throw Error(ErrorCode::NotPowerOfTwo, "dimension " + std::to_string(n));
  return k;
}

}  // namespace cpk
