// SPDX-License-Identifier: Apache-2.0

#include "cbg/half.hpp"

#include <bit>

namespace cbg {

uint16_t half_from_double(double x) noexcept {
    const uint64_t bits = std::bit_cast<uint64_t>(x);
    const uint16_t sign = static_cast<uint16_t>((bits >> 48) & 0x8000u);
    const uint32_t e = static_cast<uint32_t>((bits >> 52) & 0x7FF);
    const uint64_t frac = bits & ((uint64_t{1} << 52) - 1);

    if (e == 0x7FF) {
        // NaN stays NaN; infinity saturates like any other overflow.
        return frac ? static_cast<uint16_t>(sign | 0x7E00u)
                    : static_cast<uint16_t>(sign | 0x7BFFu);
    }
    if (e == 0) {
        return sign;  // below 2^-1022, rounds to zero
    }
    const int unbiased = static_cast<int>(e) - 1023;
    if (unbiased >= 16) {
        return static_cast<uint16_t>(sign | 0x7BFFu);
    }
    if (unbiased >= -14) {
        // Normal half candidate: keep 10 fraction bits, round the rest.
        uint64_t keep = frac >> 42;
        const uint64_t rest = frac & ((uint64_t{1} << 42) - 1);
        const uint64_t half_point = uint64_t{1} << 41;
        if (rest > half_point || (rest == half_point && (keep & 1))) {
            ++keep;
        }
        uint32_t hexp = static_cast<uint32_t>(unbiased + 15);
        if (keep == 1024) {
            keep = 0;
            ++hexp;
        }
        if (hexp >= 31) {
            return static_cast<uint16_t>(sign | 0x7BFFu);
        }
        return static_cast<uint16_t>(sign | (hexp << 10) |
                                     static_cast<uint32_t>(keep));
    }
    // Subnormal half: value in units of 2^-24.
    const int shift = 28 - unbiased;  // >= 43
    if (shift >= 54) {
        return sign;
    }
    const uint64_t sig = frac | (uint64_t{1} << 52);
    uint64_t keep = sig >> shift;
    const uint64_t rest = sig & ((uint64_t{1} << shift) - 1);
    const uint64_t half_point = uint64_t{1} << (shift - 1);
    if (rest > half_point || (rest == half_point && (keep & 1))) {
        ++keep;
    }
    // keep == 1024 means the value rounded up to 2^-14, the smallest normal.
    return static_cast<uint16_t>(sign | static_cast<uint32_t>(keep));
}

double half_to_double(uint16_t h) noexcept {
    const uint64_t sign = static_cast<uint64_t>(h >> 15) << 63;
    const uint32_t e = (h >> 10) & 31;
    const uint32_t frac = h & 1023;

    if (e == 0) {
        const double mag = frac * 0x1p-24;  // exact
        return (h & 0x8000u) ? -mag : mag;
    }
    if (e == 31) {
        const uint64_t bits =
            sign | (uint64_t{0x7FF} << 52) |
            (frac ? (static_cast<uint64_t>(frac) << 42) : uint64_t{0});
        return std::bit_cast<double>(bits);
    }
    const uint64_t bits = sign |
                          (static_cast<uint64_t>(e - 15 + 1023) << 52) |
                          (static_cast<uint64_t>(frac) << 42);
    return std::bit_cast<double>(bits);
}

}  // namespace cbg
