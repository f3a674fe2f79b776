// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cbg/frsz2.hpp"

namespace cbg {

enum class FormatKind { f64, f32, f16, frsz2 };

/// Storage format of the Krylov basis panel. Arithmetic is always binary64;
/// the format only controls how written columns are stored. f32/f16 narrow
/// with IEEE round-to-nearest-even; frsz2 uses block size 32 with
/// bit length 16, 21 or 32.
struct StorageFormat {
    FormatKind kind = FormatKind::f64;
    Frsz2Params frsz2;  // meaningful only when kind == frsz2

    static StorageFormat f64() { return {FormatKind::f64, {}}; }
    static StorageFormat f32() { return {FormatKind::f32, {}}; }
    static StorageFormat f16() { return {FormatKind::f16, {}}; }
    static StorageFormat frsz2_format(uint32_t bit_length);

    /// Accepts "f64", "f32", "f16", "frsz2-16", "frsz2-21", "frsz2-32".
    static std::optional<StorageFormat> parse(std::string_view name);
    std::string name() const;

    /// Stored bytes for one column of n values.
    size_t column_bytes(size_t n) const;
};

/// Panel of Krylov basis vectors behind a storage format. Writes encode a
/// whole column; reads always decode to binary64. Columns are independent
/// buffers, so concurrent reads are safe; writes need exclusive access.
class KrylovBasis {
public:
    static constexpr size_t kBlock = 32;  // read granularity for all formats

    KrylovBasis(size_t length, size_t capacity, StorageFormat format);

    size_t length() const { return n_; }
    size_t capacity() const { return capacity_; }
    size_t count() const { return count_; }
    size_t num_blocks() const { return (n_ + kBlock - 1) / kBlock; }
    const StorageFormat& format() const { return format_; }

    /// Append (j == count) or overwrite (j < count) column j.
    void write_vector(size_t j, std::span<const double> values);

    /// Decode block blk of column j into out (size kBlock); positions past
    /// the vector length read 0.0.
    void read_block(size_t j, size_t blk, std::span<double> out) const;

    /// Single-element read; decodes one code, slower than read_block.
    double read_element(size_t j, size_t i) const;

    /// Dot product of column j with w: per-block partial sums, blocks and
    /// elements both accumulated left to right.
    double dot(size_t j, std::span<const double> w) const;

    /// y -= alpha * column j.
    void subtract_scaled(size_t j, double alpha, std::span<double> y) const;

private:
    size_t n_;
    size_t capacity_;
    StorageFormat format_;
    size_t count_ = 0;
    std::vector<std::vector<double>> cols_f64_;
    std::vector<std::vector<float>> cols_f32_;
    std::vector<std::vector<uint16_t>> cols_f16_;
    std::vector<CompressedVector> cols_frsz2_;

    void check_column(size_t j) const;
};

}  // namespace cbg
