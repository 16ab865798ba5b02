#pragma once

// Thin wrappers around libquadmath for the extended-precision evaluation of
// the inclusion-exclusion closed forms. The signed subset sums cancel by many
// orders of magnitude at high SNR; double precision cannot resolve average
// BLER values much below ~1e-8 relative to the term mass, __float128 can.

#include <quadmath.h>

namespace fas::detail {

using f128 = __float128;

inline f128 exp_w(f128 x) { return expq(x); }
inline f128 expm1_w(f128 x) { return expm1q(x); }
inline f128 log_w(f128 x) { return logq(x); }
inline f128 fabs_w(f128 x) { return fabsq(x); }

inline double exp_w(double x) { return std::exp(x); }
inline double expm1_w(double x) { return std::expm1(x); }
inline double log_w(double x) { return std::log(x); }
inline double fabs_w(double x) { return std::fabs(x); }

}  // namespace fas::detail
