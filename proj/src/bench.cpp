// SPDX-License-Identifier: Apache-2.0

#include "cbg/bench.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>

#include "cbg/half.hpp"
#include "cbg/kernels.hpp"

namespace cbg {
namespace {

struct Prepared {
    StorageFormat fmt;
    std::vector<double> f64;
    std::vector<float> f32;
    std::vector<uint16_t> f16;
    std::optional<CompressedVector> cv;
    size_t stored_bytes = 0;
};

Prepared prepare(const StorageFormat& fmt, std::span<const double> data) {
    Prepared p;
    p.fmt = fmt;
    p.stored_bytes = fmt.column_bytes(data.size());
    switch (fmt.kind) {
    case FormatKind::f64:
        p.f64.assign(data.begin(), data.end());
        break;
    case FormatKind::f32:
        p.f32.resize(data.size());
        kernels::active_ops().narrow_f32(data.data(), data.size(),
                                         p.f32.data());
        break;
    case FormatKind::f16:
        p.f16.resize(data.size());
        for (size_t i = 0; i < data.size(); ++i) {
            p.f16[i] = half_from_double(data[i]);
        }
        break;
    case FormatKind::frsz2:
        p.cv = compress(data, fmt.frsz2);
        break;
    }
    return p;
}

// One sweep: decode each 32-value block to binary64, run `intensity`
// multiply-adds per value, and fold the block into the checksum.
double sweep(const Prepared& p, size_t n, int intensity, double mul,
             double add, double& checksum) {
    constexpr size_t kBlock = KrylovBasis::kBlock;
    double buf[kBlock];
    const size_t blocks = n / kBlock;
    const kernels::Ops& ops = kernels::active_ops();
    double acc = 0.0;

    const auto t0 = std::chrono::steady_clock::now();
    for (size_t b = 0; b < blocks; ++b) {
        const size_t off = b * kBlock;
        switch (p.fmt.kind) {
        case FormatKind::f64:
            std::copy_n(p.f64.data() + off, kBlock, buf);
            break;
        case FormatKind::f32:
            ops.widen_f32(p.f32.data() + off, kBlock, buf);
            break;
        case FormatKind::f16:
            for (size_t r = 0; r < kBlock; ++r) {
                buf[r] = half_to_double(p.f16[off + r]);
            }
            break;
        case FormatKind::frsz2:
            decompress_block(*p.cv, b, buf);
            break;
        }
        for (int t = 0; t < intensity; ++t) {
            for (size_t r = 0; r < kBlock; ++r) {
                buf[r] = buf[r] * mul + add;
            }
        }
        double s = 0.0;
        for (size_t r = 0; r < kBlock; ++r) {
            s += buf[r];
        }
        acc += s;
    }
    const auto t1 = std::chrono::steady_clock::now();
    checksum += acc;
    return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

std::vector<BenchResult> run_read_benchmark(
    size_t elements, std::span<const StorageFormat> formats,
    std::span<const int> intensities, int trials, uint64_t seed) {
    constexpr size_t kBlock = KrylovBasis::kBlock;
    if (elements < kBlock) {
        throw std::invalid_argument("bench: need at least one block");
    }
    if (trials < 1) {
        throw std::invalid_argument("bench: trials must be >= 1");
    }
    for (int intensity : intensities) {
        if (intensity < 1) {
            throw std::invalid_argument("bench: intensity must be >= 1");
        }
    }
    const size_t n = elements / kBlock * kBlock;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> data(n);
    for (double& v : data) {
        v = dist(rng);
    }
    // Runtime constants keep the arithmetic loop from folding away.
    const double mul = 1.0 + dist(rng) * 1e-7;
    const double add = dist(rng) * 1e-9;

    volatile double sink = 0.0;
    std::vector<BenchResult> results;
    for (const StorageFormat& fmt : formats) {
        const Prepared p = prepare(fmt, data);
        for (int intensity : intensities) {
            double checksum = 0.0;
            sweep(p, n, intensity, mul, add, checksum);  // warm-up
            double best = std::numeric_limits<double>::infinity();
            for (int t = 0; t < trials; ++t) {
                best = std::min(best, sweep(p, n, intensity, mul, add,
                                            checksum));
            }
            sink = sink + checksum;
            BenchResult r;
            r.format = fmt.name();
            r.intensity = intensity;
            r.elements = n;
            r.stored_bytes = p.stored_bytes;
            r.seconds = best;
            r.stored_gbps = static_cast<double>(p.stored_bytes) / best / 1e9;
            r.logical_gbps = static_cast<double>(n) * 8.0 / best / 1e9;
            results.push_back(std::move(r));
        }
    }
    return results;
}

}  // namespace cbg
