// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>

namespace cbg::kernels {

inline constexpr uint64_t kFracMask52 = (uint64_t{1} << 52) - 1;

/// Encode one binary64 value into an l-bit code relative to the block
/// exponent e_max (biased). Layout: sign at bit l-1, then the significand
/// with its explicit integer bit, truncated toward zero. Zeros and
/// subnormals map to a signed all-zero significand. The caller guarantees
/// the input is finite and that its biased exponent does not exceed e_max.
inline uint64_t encode_one(double x, uint32_t e_max, uint32_t l) noexcept {
    const uint64_t bits = std::bit_cast<uint64_t>(x);
    const uint64_t sign = bits >> 63;
    const uint32_t e = static_cast<uint32_t>((bits >> 52) & 0x7FF);
    if (e == 0) {
        return sign << (l - 1);
    }
    const uint64_t sig = (bits & kFracMask52) | (uint64_t{1} << 52);
    const int shift = 54 - static_cast<int>(l) + static_cast<int>(e_max) -
                      static_cast<int>(e);
    uint64_t mag;
    if (shift >= 64) {
        mag = 0;
    } else if (shift >= 0) {
        mag = sig >> shift;
    } else {
        mag = sig << -shift;
    }
    return (sign << (l - 1)) | mag;
}

/// Decode one l-bit code back to binary64. The leading-zero count of the
/// significand recovers the exponent offset from e_max; results whose
/// biased exponent would be <= 0 flush to a signed zero.
inline double decode_one(uint64_t code, uint32_t e_max, uint32_t l) noexcept {
    const uint64_t sign = (code >> (l - 1)) & 1;
    const uint64_t mag = code & ((uint64_t{1} << (l - 1)) - 1);
    if (mag == 0) {
        return std::bit_cast<double>(sign << 63);
    }
    const int p = 63 - std::countl_zero(mag);
    const int k = static_cast<int>(l) - 2 - p;
    const int e = static_cast<int>(e_max) - k;
    if (e <= 0) {
        return std::bit_cast<double>(sign << 63);
    }
    const uint64_t frac = mag ^ (uint64_t{1} << p);
    const uint64_t frac52 = p <= 52 ? frac << (52 - p) : frac >> (p - 52);
    return std::bit_cast<double>((sign << 63) |
                                 (static_cast<uint64_t>(e) << 52) | frac52);
}

/// One dispatchable kernel set. The scalar entries are the reference
/// semantics; SIMD variants must match them bit for bit.
struct Ops {
    const char* name;
    // Max biased exponent field over n values (subnormals count as 0,
    // non-finite values as 0x7FF).
    uint32_t (*max_biased_exp)(const double* v, size_t n);
    // Per-value codes for 2 <= l <= 32, one code per 32-bit slot.
    void (*encode_codes)(const double* v, size_t n, uint32_t e_max, uint32_t l,
                         uint32_t* codes);
    void (*decode_codes)(const uint32_t* codes, size_t n, uint32_t e_max,
                         uint32_t l, double* out);
    // l == 16 lane specialization reading packed 16-bit codes.
    void (*decode_codes_u16)(const uint16_t* codes, size_t n, uint32_t e_max,
                             double* out);
    void (*widen_f32)(const float* in, size_t n, double* out);
    void (*narrow_f32)(const double* in, size_t n, float* out);
};

const Ops& scalar_ops();
// Null when the build or the running CPU lacks AVX2.
const Ops* avx2_ops();
bool avx2_supported();
// AVX2 when available unless the CBG_KERNELS environment variable says
// "scalar"; resolved once per process.
const Ops& active_ops();

}  // namespace cbg::kernels
