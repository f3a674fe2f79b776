// SPDX-License-Identifier: Apache-2.0

#include "cbg/kernels.hpp"

namespace cbg::kernels {
namespace {

uint32_t max_biased_exp_scalar(const double* v, size_t n) {
    uint32_t e_max = 0;
    for (size_t i = 0; i < n; ++i) {
        const uint64_t bits = std::bit_cast<uint64_t>(v[i]);
        const uint32_t e = static_cast<uint32_t>((bits >> 52) & 0x7FF);
        if (e > e_max) {
            e_max = e;
        }
    }
    return e_max;
}

void encode_codes_scalar(const double* v, size_t n, uint32_t e_max, uint32_t l,
                         uint32_t* codes) {
    for (size_t i = 0; i < n; ++i) {
        codes[i] = static_cast<uint32_t>(encode_one(v[i], e_max, l));
    }
}

void decode_codes_scalar(const uint32_t* codes, size_t n, uint32_t e_max,
                         uint32_t l, double* out) {
    for (size_t i = 0; i < n; ++i) {
        out[i] = decode_one(codes[i], e_max, l);
    }
}

void decode_codes_u16_scalar(const uint16_t* codes, size_t n, uint32_t e_max,
                             double* out) {
    for (size_t i = 0; i < n; ++i) {
        out[i] = decode_one(codes[i], e_max, 16);
    }
}

void widen_f32_scalar(const float* in, size_t n, double* out) {
    for (size_t i = 0; i < n; ++i) {
        out[i] = static_cast<double>(in[i]);
    }
}

void narrow_f32_scalar(const double* in, size_t n, float* out) {
    for (size_t i = 0; i < n; ++i) {
        out[i] = static_cast<float>(in[i]);
    }
}

constexpr Ops kScalarOps = {
    "scalar",
    max_biased_exp_scalar,
    encode_codes_scalar,
    decode_codes_scalar,
    decode_codes_u16_scalar,
    widen_f32_scalar,
    narrow_f32_scalar,
};

}  // namespace

const Ops& scalar_ops() { return kScalarOps; }

}  // namespace cbg::kernels
