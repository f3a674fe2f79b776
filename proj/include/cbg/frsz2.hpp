// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace cbg {

/// Configuration of the frsz2 block floating-point format: values are
/// grouped into blocks of block_size elements that share one biased
/// exponent, and each value keeps bit_length bits (sign + significand).
struct Frsz2Params {
    uint32_t block_size = 32;
    uint32_t bit_length = 32;

    void validate() const;  // block_size >= 1, 2 <= bit_length <= 64
    size_t words_per_block() const;  // ceil(block_size * bit_length / 32)
};

/// One compressed vector: a 32-bit biased exponent per block plus the
/// bit-packed codes. Code j of a block occupies bits [j*l, (j+1)*l) of the
/// block's payload bit-stream, LSB first within 32-bit words; for l in
/// {16, 32} this degenerates to whole 16-/32-bit lanes. Instances are
/// immutable after construction and safe to share across threads.
class CompressedVector {
public:
    CompressedVector(Frsz2Params params, size_t n);

    const Frsz2Params& params() const { return params_; }
    size_t size() const { return n_; }
    size_t num_blocks() const;
    std::span<const uint32_t> exponents() const { return exponents_; }
    std::span<const uint32_t> payload() const { return payload_; }

private:
    Frsz2Params params_;
    size_t n_ = 0;
    std::vector<uint32_t> exponents_;
    std::vector<uint32_t> payload_;

    friend CompressedVector compress(std::span<const double>,
                                     const Frsz2Params&);
    friend CompressedVector read_frsz2_file(std::istream&);
};

/// Result of encoding one block in isolation.
struct BlockEncoding {
    uint32_t e_max = 0;  // biased
    std::vector<uint64_t> codes;
};

/// Encode one block of finite values (the caller zero-pads partial
/// blocks). Throws std::invalid_argument naming the offending index on
/// non-finite input.
BlockEncoding compress_block(std::span<const double> values,
                             uint32_t bit_length);

CompressedVector compress(std::span<const double> values,
                          const Frsz2Params& params);

/// Random access to a single element.
double decompress_value(const CompressedVector& cv, size_t i);

/// Decode a whole block; out.size() must equal block_size. Padding
/// positions past the vector length decode to 0.0.
void decompress_block(const CompressedVector& cv, size_t block,
                      std::span<double> out);

void decompress(const CompressedVector& cv, std::span<double> out);
std::vector<double> decompress(const CompressedVector& cv);

/// Bytes of exponents + payload for n elements (header excluded).
size_t storage_bytes(size_t n, const Frsz2Params& params);

/// Exclusive upper bound on the absolute error of any value in a block
/// with the given biased shared exponent: 2^((e_max-1023)-(l-2)).
double max_abs_error_bound(uint32_t e_max_biased, uint32_t bit_length);

// Container file: little-endian; magic "FRSZ2\0", u16 version = 1,
// u32 block_size, u32 bit_length, u64 n, then the exponent words and the
// payload words.
void write_frsz2_file(std::ostream& os, const CompressedVector& cv);
CompressedVector read_frsz2_file(std::istream& is);

}  // namespace cbg
