// SPDX-License-Identifier: Apache-2.0

#include "cbg/basis.hpp"

#include <algorithm>
#include <stdexcept>

#include "cbg/half.hpp"
#include "cbg/kernels.hpp"

namespace cbg {

StorageFormat StorageFormat::frsz2_format(uint32_t bit_length) {
    if (bit_length != 16 && bit_length != 21 && bit_length != 32) {
        throw std::invalid_argument(
            "storage format: frsz2 bit length must be 16, 21 or 32");
    }
    StorageFormat f;
    f.kind = FormatKind::frsz2;
    f.frsz2 = Frsz2Params{32, bit_length};
    return f;
}

std::optional<StorageFormat> StorageFormat::parse(std::string_view name) {
    if (name == "f64") return f64();
    if (name == "f32") return f32();
    if (name == "f16") return f16();
    if (name == "frsz2-16") return frsz2_format(16);
    if (name == "frsz2-21") return frsz2_format(21);
    if (name == "frsz2-32") return frsz2_format(32);
    return std::nullopt;
}

std::string StorageFormat::name() const {
    switch (kind) {
    case FormatKind::f64: return "f64";
    case FormatKind::f32: return "f32";
    case FormatKind::f16: return "f16";
    case FormatKind::frsz2:
        return "frsz2-" + std::to_string(frsz2.bit_length);
    }
    return "unknown";
}

size_t StorageFormat::column_bytes(size_t n) const {
    switch (kind) {
    case FormatKind::f64: return n * 8;
    case FormatKind::f32: return n * 4;
    case FormatKind::f16: return n * 2;
    case FormatKind::frsz2: return storage_bytes(n, frsz2);
    }
    return 0;
}

KrylovBasis::KrylovBasis(size_t length, size_t capacity, StorageFormat format)
    : n_(length), capacity_(capacity), format_(format) {
    if (format_.kind == FormatKind::frsz2) {
        format_.frsz2.validate();
        if (format_.frsz2.block_size != kBlock) {
            throw std::invalid_argument("basis: frsz2 block size must be 32");
        }
    }
    switch (format_.kind) {
    case FormatKind::f64:
        cols_f64_.assign(capacity_, std::vector<double>());
        break;
    case FormatKind::f32:
        cols_f32_.assign(capacity_, std::vector<float>());
        break;
    case FormatKind::f16:
        cols_f16_.assign(capacity_, std::vector<uint16_t>());
        break;
    case FormatKind::frsz2:
        cols_frsz2_.assign(capacity_, CompressedVector(format_.frsz2, 0));
        break;
    }
}

void KrylovBasis::check_column(size_t j) const {
    if (j >= count_) {
        throw std::out_of_range("basis: column index out of range");
    }
}

void KrylovBasis::write_vector(size_t j, std::span<const double> values) {
    if (j > count_ || j >= capacity_) {
        throw std::out_of_range("basis: cannot write column");
    }
    if (values.size() != n_) {
        throw std::invalid_argument("basis: length mismatch");
    }
    switch (format_.kind) {
    case FormatKind::f64:
        cols_f64_[j].assign(values.begin(), values.end());
        break;
    case FormatKind::f32: {
        auto& col = cols_f32_[j];
        col.resize(n_);
        kernels::active_ops().narrow_f32(values.data(), n_, col.data());
        break;
    }
    case FormatKind::f16: {
        auto& col = cols_f16_[j];
        col.resize(n_);
        for (size_t i = 0; i < n_; ++i) {
            col[i] = half_from_double(values[i]);
        }
        break;
    }
    case FormatKind::frsz2:
        cols_frsz2_[j] = compress(values, format_.frsz2);
        break;
    }
    count_ = std::max(count_, j + 1);
}

void KrylovBasis::read_block(size_t j, size_t blk, std::span<double> out) const {
    check_column(j);
    if (blk >= num_blocks()) {
        throw std::out_of_range("basis: block index out of range");
    }
    if (out.size() != kBlock) {
        throw std::invalid_argument("basis: output span must hold one block");
    }
    if (format_.kind == FormatKind::frsz2) {
        decompress_block(cols_frsz2_[j], blk, out);
        return;
    }
    const size_t off = blk * kBlock;
    const size_t have = std::min(kBlock, n_ - off);
    switch (format_.kind) {
    case FormatKind::f64: {
        const auto& col = cols_f64_[j];
        std::copy(col.begin() + off, col.begin() + off + have, out.begin());
        break;
    }
    case FormatKind::f32:
        kernels::active_ops().widen_f32(cols_f32_[j].data() + off, have,
                                        out.data());
        break;
    case FormatKind::f16: {
        const auto& col = cols_f16_[j];
        for (size_t i = 0; i < have; ++i) {
            out[i] = half_to_double(col[off + i]);
        }
        break;
    }
    case FormatKind::frsz2:
        break;  // handled above
    }
    std::fill(out.begin() + have, out.end(), 0.0);
}

double KrylovBasis::read_element(size_t j, size_t i) const {
    check_column(j);
    if (i >= n_) {
        throw std::out_of_range("basis: element index out of range");
    }
    switch (format_.kind) {
    case FormatKind::f64: return cols_f64_[j][i];
    case FormatKind::f32: return static_cast<double>(cols_f32_[j][i]);
    case FormatKind::f16: return half_to_double(cols_f16_[j][i]);
    case FormatKind::frsz2: return decompress_value(cols_frsz2_[j], i);
    }
    return 0.0;
}

double KrylovBasis::dot(size_t j, std::span<const double> w) const {
    check_column(j);
    if (w.size() != n_) {
        throw std::invalid_argument("basis: length mismatch");
    }
    double buf[kBlock];
    double total = 0.0;
    const size_t blocks = num_blocks();
    for (size_t b = 0; b < blocks; ++b) {
        read_block(j, b, buf);
        const size_t off = b * kBlock;
        const size_t have = std::min(kBlock, n_ - off);
        double partial = 0.0;
        for (size_t r = 0; r < have; ++r) {
            partial += buf[r] * w[off + r];
        }
        total += partial;
    }
    return total;
}

void KrylovBasis::subtract_scaled(size_t j, double alpha,
                                  std::span<double> y) const {
    check_column(j);
    if (y.size() != n_) {
        throw std::invalid_argument("basis: length mismatch");
    }
    double buf[kBlock];
    const size_t blocks = num_blocks();
    for (size_t b = 0; b < blocks; ++b) {
        read_block(j, b, buf);
        const size_t off = b * kBlock;
        const size_t have = std::min(kBlock, n_ - off);
        for (size_t r = 0; r < have; ++r) {
            y[off + r] -= alpha * buf[r];
        }
    }
}

}  // namespace cbg
