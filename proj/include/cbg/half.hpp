// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace cbg {

// IEEE 754 binary16 <-> binary64 conversions. Narrowing rounds to nearest
// (ties to even) and saturates overflow to +-65504 so the conversion is
// total on real inputs; widening is exact.
uint16_t half_from_double(double x) noexcept;
double half_to_double(uint16_t h) noexcept;

}  // namespace cbg
