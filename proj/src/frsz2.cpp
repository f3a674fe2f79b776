// SPDX-License-Identifier: Apache-2.0

#include "cbg/frsz2.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "cbg/kernels.hpp"

namespace cbg {

static_assert(std::endian::native == std::endian::little,
              "container layout assumes a little-endian host");

namespace {

constexpr char kMagic[6] = {'F', 'R', 'S', 'Z', '2', '\0'};
constexpr uint16_t kVersion = 1;

size_t ceil_div(size_t a, size_t b) { return (a + b - 1) / b; }

[[noreturn]] void throw_non_finite(size_t index) {
    throw std::invalid_argument("frsz2: non-finite value at index " +
                                std::to_string(index));
}

void check_finite(std::span<const double> values) {
    for (size_t i = 0; i < values.size(); ++i) {
        const uint64_t bits = std::bit_cast<uint64_t>(values[i]);
        if (((bits >> 52) & 0x7FF) == 0x7FF) {
            throw_non_finite(i);
        }
    }
}

// LSB-first bit stream over 32-bit words: stream bit b lives in word b/32
// at in-word position b%32.
uint64_t get_bits(const uint32_t* words, size_t bit_off, uint32_t nbits) {
    uint64_t out = 0;
    uint32_t got = 0;
    while (got < nbits) {
        const size_t wi = (bit_off + got) >> 5;
        const uint32_t sh = static_cast<uint32_t>((bit_off + got) & 31);
        const uint32_t take = std::min(32 - sh, nbits - got);
        const uint32_t mask =
            take == 32 ? 0xFFFFFFFFu : ((uint32_t{1} << take) - 1);
        out |= static_cast<uint64_t>((words[wi] >> sh) & mask) << got;
        got += take;
    }
    return out;
}

void put_bits(uint32_t* words, size_t bit_off, uint64_t value,
              uint32_t nbits) {
    uint32_t put = 0;
    while (put < nbits) {
        const size_t wi = (bit_off + put) >> 5;
        const uint32_t sh = static_cast<uint32_t>((bit_off + put) & 31);
        const uint32_t take = std::min(32 - sh, nbits - put);
        const uint32_t mask =
            take == 32 ? 0xFFFFFFFFu : ((uint32_t{1} << take) - 1);
        words[wi] |= (static_cast<uint32_t>(value >> put) & mask) << sh;
        put += take;
    }
}

// Encode one full block of bs finite values into the payload words for
// that block. Scratch must hold bs entries.
void encode_block_payload(const double* v, uint32_t bs, uint32_t l,
                          uint32_t e_max, uint32_t* words, uint32_t* scratch) {
    const kernels::Ops& ops = kernels::active_ops();
    if (l == 32) {
        ops.encode_codes(v, bs, e_max, 32, words);
        return;
    }
    if (l <= 32) {
        ops.encode_codes(v, bs, e_max, l, scratch);
        if (l == 16) {
            auto* lanes = reinterpret_cast<uint16_t*>(words);
            for (uint32_t j = 0; j < bs; ++j) {
                lanes[j] = static_cast<uint16_t>(scratch[j]);
            }
        } else {
            for (uint32_t j = 0; j < bs; ++j) {
                put_bits(words, static_cast<size_t>(j) * l, scratch[j], l);
            }
        }
        return;
    }
    for (uint32_t j = 0; j < bs; ++j) {
        put_bits(words, static_cast<size_t>(j) * l,
                 kernels::encode_one(v[j], e_max, l), l);
    }
}

void decode_block_payload(const uint32_t* words, uint32_t bs, uint32_t l,
                          uint32_t e_max, double* out, uint32_t* scratch) {
    const kernels::Ops& ops = kernels::active_ops();
    if (l == 32) {
        ops.decode_codes(words, bs, e_max, 32, out);
        return;
    }
    if (l == 16) {
        ops.decode_codes_u16(reinterpret_cast<const uint16_t*>(words), bs,
                             e_max, out);
        return;
    }
    if (l <= 32) {
        for (uint32_t j = 0; j < bs; ++j) {
            scratch[j] = static_cast<uint32_t>(
                get_bits(words, static_cast<size_t>(j) * l, l));
        }
        ops.decode_codes(scratch, bs, e_max, l, out);
        return;
    }
    for (uint32_t j = 0; j < bs; ++j) {
        out[j] = kernels::decode_one(
            get_bits(words, static_cast<size_t>(j) * l, l), e_max, l);
    }
}

}  // namespace

void Frsz2Params::validate() const {
    if (block_size < 1) {
        throw std::invalid_argument("frsz2: block_size must be >= 1");
    }
    if (bit_length < 2 || bit_length > 64) {
        throw std::invalid_argument("frsz2: bit_length must be in [2, 64]");
    }
}

size_t Frsz2Params::words_per_block() const {
    return ceil_div(static_cast<size_t>(block_size) * bit_length, 32);
}

CompressedVector::CompressedVector(Frsz2Params params, size_t n)
    : params_(params), n_(n) {
    params_.validate();
    const size_t blocks = num_blocks();
    exponents_.assign(blocks, 0);
    payload_.assign(blocks * params_.words_per_block(), 0);
}

size_t CompressedVector::num_blocks() const {
    return ceil_div(n_, params_.block_size);
}

BlockEncoding compress_block(std::span<const double> values,
                             uint32_t bit_length) {
    Frsz2Params p{static_cast<uint32_t>(values.size()), bit_length};
    p.validate();
    check_finite(values);
    BlockEncoding enc;
    enc.e_max = kernels::active_ops().max_biased_exp(values.data(),
                                                     values.size());
    enc.codes.resize(values.size());
    for (size_t j = 0; j < values.size(); ++j) {
        enc.codes[j] = kernels::encode_one(values[j], enc.e_max, bit_length);
    }
    return enc;
}

CompressedVector compress(std::span<const double> values,
                          const Frsz2Params& params) {
    params.validate();
    check_finite(values);
    CompressedVector cv(params, values.size());
    const uint32_t bs = params.block_size;
    const uint32_t l = params.bit_length;
    const size_t wpb = params.words_per_block();
    const kernels::Ops& ops = kernels::active_ops();

    std::vector<uint32_t> scratch(bs);
    std::vector<double> tail(bs, 0.0);
    const size_t blocks = cv.num_blocks();
    for (size_t b = 0; b < blocks; ++b) {
        const size_t off = b * static_cast<size_t>(bs);
        const size_t have = std::min<size_t>(bs, values.size() - off);
        const double* src = values.data() + off;
        if (have < bs) {
            std::copy(src, src + have, tail.begin());
            std::fill(tail.begin() + have, tail.end(), 0.0);
            src = tail.data();
        }
        const uint32_t e_max = ops.max_biased_exp(src, bs);
        cv.exponents_[b] = e_max;
        encode_block_payload(src, bs, l, e_max, cv.payload_.data() + b * wpb,
                             scratch.data());
    }
    return cv;
}

double decompress_value(const CompressedVector& cv, size_t i) {
    if (i >= cv.size()) {
        throw std::out_of_range("frsz2: index out of range");
    }
    const uint32_t bs = cv.params().block_size;
    const uint32_t l = cv.params().bit_length;
    const size_t b = i / bs;
    const size_t r = i % bs;
    const uint32_t* words = cv.payload().data() + b * cv.params().words_per_block();
    const uint32_t e_max = cv.exponents()[b];
    uint64_t code;
    if (l == 32) {
        code = words[r];
    } else if (l == 16) {
        code = reinterpret_cast<const uint16_t*>(words)[r];
    } else {
        code = get_bits(words, r * static_cast<size_t>(l), l);
    }
    return kernels::decode_one(code, e_max, l);
}

void decompress_block(const CompressedVector& cv, size_t block,
                      std::span<double> out) {
    if (block >= cv.num_blocks()) {
        throw std::out_of_range("frsz2: block index out of range");
    }
    const uint32_t bs = cv.params().block_size;
    if (out.size() != bs) {
        throw std::invalid_argument("frsz2: output span must hold one block");
    }
    const uint32_t l = cv.params().bit_length;
    constexpr uint32_t kStackScratch = 256;
    uint32_t stack_buf[kStackScratch];
    std::vector<uint32_t> heap_buf;
    uint32_t* scratch = nullptr;
    if (l < 32 && l != 16) {
        if (bs <= kStackScratch) {
            scratch = stack_buf;
        } else {
            heap_buf.resize(bs);
            scratch = heap_buf.data();
        }
    }
    decode_block_payload(cv.payload().data() +
                             block * cv.params().words_per_block(),
                         bs, l, cv.exponents()[block], out.data(), scratch);
}

void decompress(const CompressedVector& cv, std::span<double> out) {
    if (out.size() != cv.size()) {
        throw std::invalid_argument("frsz2: output length mismatch");
    }
    const uint32_t bs = cv.params().block_size;
    std::vector<double> buf(bs);
    for (size_t b = 0; b < cv.num_blocks(); ++b) {
        decompress_block(cv, b, buf);
        const size_t off = b * static_cast<size_t>(bs);
        const size_t take = std::min<size_t>(bs, cv.size() - off);
        std::copy(buf.begin(), buf.begin() + take, out.begin() + off);
    }
}

std::vector<double> decompress(const CompressedVector& cv) {
    std::vector<double> out(cv.size());
    decompress(cv, out);
    return out;
}

size_t storage_bytes(size_t n, const Frsz2Params& params) {
    params.validate();
    const size_t blocks = ceil_div(n, params.block_size);
    return blocks * params.words_per_block() * 4 + blocks * 4;
}

double max_abs_error_bound(uint32_t e_max_biased, uint32_t bit_length) {
    return std::ldexp(1.0, static_cast<int>(e_max_biased) - 1023 -
                               (static_cast<int>(bit_length) - 2));
}

namespace {

template <typename T>
void write_le(std::ostream& os, T value) {
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
    T value{};
    if (!is.read(reinterpret_cast<char*>(&value), sizeof(T))) {
        throw std::runtime_error("frsz2 container: truncated file");
    }
    return value;
}

}  // namespace

void write_frsz2_file(std::ostream& os, const CompressedVector& cv) {
    os.write(kMagic, sizeof(kMagic));
    write_le(os, kVersion);
    write_le(os, cv.params().block_size);
    write_le(os, cv.params().bit_length);
    write_le(os, static_cast<uint64_t>(cv.size()));
    os.write(reinterpret_cast<const char*>(cv.exponents().data()),
             static_cast<std::streamsize>(cv.exponents().size() * 4));
    os.write(reinterpret_cast<const char*>(cv.payload().data()),
             static_cast<std::streamsize>(cv.payload().size() * 4));
    if (!os) {
        throw std::runtime_error("frsz2 container: write failed");
    }
}

CompressedVector read_frsz2_file(std::istream& is) {
    char magic[sizeof(kMagic)];
    if (!is.read(magic, sizeof(magic)) ||
        std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("frsz2 container: bad magic");
    }
    const auto version = read_le<uint16_t>(is);
    if (version != kVersion) {
        throw std::runtime_error("frsz2 container: unsupported version " +
                                 std::to_string(version));
    }
    Frsz2Params params;
    params.block_size = read_le<uint32_t>(is);
    params.bit_length = read_le<uint32_t>(is);
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("frsz2 container: ") + e.what());
    }
    const auto n = read_le<uint64_t>(is);
    CompressedVector cv(params, static_cast<size_t>(n));
    if (!is.read(reinterpret_cast<char*>(cv.exponents_.data()),
                 static_cast<std::streamsize>(cv.exponents_.size() * 4)) ||
        !is.read(reinterpret_cast<char*>(cv.payload_.data()),
                 static_cast<std::streamsize>(cv.payload_.size() * 4))) {
        throw std::runtime_error("frsz2 container: truncated file");
    }
    if (is.peek() != std::istream::traits_type::eof()) {
        throw std::runtime_error("frsz2 container: trailing data");
    }
    return cv;
}

}  // namespace cbg
