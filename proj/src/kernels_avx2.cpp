// SPDX-License-Identifier: Apache-2.0

// AVX2 variants of the codec kernels. Every function must produce output
// bit-identical to the scalar reference in kernels_scalar.cpp; the
// equivalence tests enforce this.

#include "cbg/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

namespace cbg::kernels {
namespace {

uint32_t max_biased_exp_avx2(const double* v, size_t n) {
    const __m256i exp_mask = _mm256_set1_epi64x(0x7FF);
    __m256i acc = _mm256_setzero_si256();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256i bits =
            _mm256_loadu_si256(reinterpret_cast<const __m256i*>(v + i));
        const __m256i e =
            _mm256_and_si256(_mm256_srli_epi64(bits, 52), exp_mask);
        acc = _mm256_max_epu32(acc, e);
    }
    alignas(32) uint64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
    uint32_t e_max = 0;
    for (uint64_t lane : lanes) {
        if (static_cast<uint32_t>(lane) > e_max) {
            e_max = static_cast<uint32_t>(lane);
        }
    }
    for (; i < n; ++i) {
        const uint64_t bits = std::bit_cast<uint64_t>(v[i]);
        const uint32_t e = static_cast<uint32_t>((bits >> 52) & 0x7FF);
        if (e > e_max) {
            e_max = e;
        }
    }
    return e_max;
}

void encode_codes_avx2(const double* v, size_t n, uint32_t e_max, uint32_t l,
                       uint32_t* codes) {
    const __m256i exp_mask = _mm256_set1_epi64x(0x7FF);
    const __m256i frac_mask = _mm256_set1_epi64x(kFracMask52);
    const __m256i implicit_one = _mm256_set1_epi64x(int64_t{1} << 52);
    const __m256i emax_v = _mm256_set1_epi64x(e_max);
    const __m256i shift_base =
        _mm256_set1_epi64x(54 - static_cast<int64_t>(l));
    const __m128i sign_shift = _mm_cvtsi32_si128(static_cast<int>(l) - 1);
    const __m256i zero = _mm256_setzero_si256();
    const __m256i lane_pick = _mm256_setr_epi32(0, 2, 4, 6, 0, 0, 0, 0);

    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256i bits =
            _mm256_loadu_si256(reinterpret_cast<const __m256i*>(v + i));
        const __m256i sign = _mm256_srli_epi64(bits, 63);
        const __m256i e =
            _mm256_and_si256(_mm256_srli_epi64(bits, 52), exp_mask);
        const __m256i sig =
            _mm256_or_si256(_mm256_and_si256(bits, frac_mask), implicit_one);
        const __m256i shift =
            _mm256_add_epi64(_mm256_sub_epi64(emax_v, e), shift_base);
        // Shift counts >= 64 yield 0, matching the scalar underflow case.
        __m256i mag = _mm256_srlv_epi64(sig, shift);
        const __m256i is_zero = _mm256_cmpeq_epi64(e, zero);
        mag = _mm256_andnot_si256(is_zero, mag);
        const __m256i code =
            _mm256_or_si256(_mm256_sll_epi64(sign, sign_shift), mag);
        const __m256i packed = _mm256_permutevar8x32_epi32(code, lane_pick);
        _mm_storeu_si128(reinterpret_cast<__m128i*>(codes + i),
                         _mm256_castsi256_si128(packed));
    }
    for (; i < n; ++i) {
        codes[i] = static_cast<uint32_t>(encode_one(v[i], e_max, l));
    }
}

void decode_codes_avx2(const uint32_t* codes, size_t n, uint32_t e_max,
                       uint32_t l, double* out) {
    const int exp_adjust =
        static_cast<int>(e_max) - 1023 - (static_cast<int>(l) - 2);
    const __m256i adjust_field = _mm256_set1_epi64x(exp_adjust);
    const __m256i adjust_bits =
        _mm256_set1_epi64x(static_cast<int64_t>(exp_adjust) << 52);
    const __m128i mag_mask =
        _mm_set1_epi32(static_cast<int>((uint32_t{1} << (l - 1)) - 1));
    const __m128i sign_shift = _mm_cvtsi32_si128(static_cast<int>(l) - 1);
    const __m256i zero = _mm256_setzero_si256();

    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m128i c =
            _mm_loadu_si128(reinterpret_cast<const __m128i*>(codes + i));
        const __m128i mag32 = _mm_and_si128(c, mag_mask);
        const __m128i sign32 = _mm_srl_epi32(c, sign_shift);
        const __m256d magd = _mm256_cvtepi32_pd(mag32);
        const __m256i mb = _mm256_castpd_si256(magd);
        const __m256i mag64 = _mm256_cvtepu32_epi64(mag32);
        const __m256i sign64 =
            _mm256_slli_epi64(_mm256_cvtepu32_epi64(sign32), 63);
        const __m256i field =
            _mm256_add_epi64(_mm256_srli_epi64(mb, 52), adjust_field);
        __m256i keep = _mm256_cmpgt_epi64(field, zero);
        keep = _mm256_andnot_si256(_mm256_cmpeq_epi64(mag64, zero), keep);
        const __m256i shifted = _mm256_add_epi64(mb, adjust_bits);
        const __m256i result =
            _mm256_or_si256(_mm256_and_si256(shifted, keep), sign64);
        _mm256_storeu_pd(out + i, _mm256_castsi256_pd(result));
    }
    for (; i < n; ++i) {
        out[i] = decode_one(codes[i], e_max, l);
    }
}

void decode_codes_u16_avx2(const uint16_t* codes, size_t n, uint32_t e_max,
                           double* out) {
    uint32_t widened[64];
    size_t i = 0;
    while (i < n) {
        const size_t chunk = n - i < 64 ? n - i : 64;
        for (size_t j = 0; j < chunk; ++j) {
            widened[j] = codes[i + j];
        }
        decode_codes_avx2(widened, chunk, e_max, 16, out + i);
        i += chunk;
    }
}

void widen_f32_avx2(const float* in, size_t n, double* out) {
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_cvtps_pd(_mm_loadu_ps(in + i)));
    }
    for (; i < n; ++i) {
        out[i] = static_cast<double>(in[i]);
    }
}

void narrow_f32_avx2(const double* in, size_t n, float* out) {
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm_storeu_ps(out + i, _mm256_cvtpd_ps(_mm256_loadu_pd(in + i)));
    }
    for (; i < n; ++i) {
        out[i] = static_cast<float>(in[i]);
    }
}

constexpr Ops kAvx2Ops = {
    "avx2",
    max_biased_exp_avx2,
    encode_codes_avx2,
    decode_codes_avx2,
    decode_codes_u16_avx2,
    widen_f32_avx2,
    narrow_f32_avx2,
};

}  // namespace

const Ops* avx2_ops() { return &kAvx2Ops; }

}  // namespace cbg::kernels

#endif  // x86
