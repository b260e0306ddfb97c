#include "cpk/common.hpp"

#include <atomic>
#include <cstdlib>

namespace cpk {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotContraction: return "NotContraction";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::NotUnit: return "NotUnit";
    case ErrorCode::NotPowerOfTwo: return "NotPowerOfTwo";
    case ErrorCode::NotUnital: return "NotUnital";
    case ErrorCode::LayoutMismatch: return "LayoutMismatch";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidKraus: return "InvalidKraus";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::InvalidProgram: return "InvalidProgram";
    case ErrorCode::ZeroMatrix: return "ZeroMatrix";
    case ErrorCode::PaddingRequired: return "PaddingRequired";
    case ErrorCode::GapViolation: return "GapViolation";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

namespace {

std::size_t initial_dim_cap() {
  if (const char* env = std::getenv("CPK_DIM_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && v >= 2) return static_cast<std::size_t>(v);
  }
  return std::size_t{1} << 16;
}

std::atomic<std::size_t>& cap_storage() {
  static std::atomic<std::size_t> cap{initial_dim_cap()};
  return cap;
}

}  // namespace

std::size_t default_dim_cap() { return cap_storage().load(); }
void set_default_dim_cap(std::size_t cap) { cap_storage().store(cap); }

}  // namespace cpk
