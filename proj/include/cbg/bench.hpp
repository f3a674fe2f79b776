// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cbg/basis.hpp"

namespace cbg {

struct BenchResult {
    std::string format;
    int intensity = 0;  // fused multiply-adds per loaded value
    size_t elements = 0;
    size_t stored_bytes = 0;
    double seconds = 0.0;       // minimum over trials
    double stored_gbps = 0.0;   // stored bytes / time
    double logical_gbps = 0.0;  // 8 * elements / time
};

/// Streaming read benchmark: decode blocks of each format to binary64 and
/// run `intensity` multiply-adds per value. Reports the minimum time over
/// `trials` runs per (format, intensity) pair.
std::vector<BenchResult> run_read_benchmark(
    size_t elements, std::span<const StorageFormat> formats,
    std::span<const int> intensities, int trials, uint64_t seed);

}  // namespace cbg
