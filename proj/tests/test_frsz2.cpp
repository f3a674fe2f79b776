// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "cbg/frsz2.hpp"
#include "cbg/kernels.hpp"
#include "oracle_utils.hpp"

using namespace cbg;

namespace {

bool same_double(double a, double b) {
    return std::bit_cast<uint64_t>(a) == std::bit_cast<uint64_t>(b);
}

std::vector<double> random_values(size_t n, uint64_t seed, double lo = -1.0,
                                  double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) {
        x = dist(rng);
    }
    return v;
}

}  // namespace

TEST_CASE("compress_block: forced bit layout") {
    const std::vector<double> values = {1.0, 0.5, 0.0, -0.25};
    const BlockEncoding enc = compress_block(values, 32);
    CHECK(enc.e_max == 1023);
    REQUIRE(enc.codes.size() == 4);
    CHECK(enc.codes[0] == 0x40000000u);
    CHECK(enc.codes[1] == 0x20000000u);
    CHECK(enc.codes[2] == 0x00000000u);
    CHECK(enc.codes[3] == 0x90000000u);
}

TEST_CASE("compress_block: all-zero block") {
    const std::vector<double> values = {0.0, 0.0};
    const BlockEncoding enc = compress_block(values, 32);
    CHECK(enc.e_max == 0);
    CHECK(enc.codes[0] == 0);
    CHECK(enc.codes[1] == 0);
}

TEST_CASE("compress_block: bit below retained range truncates") {
    const std::vector<double> values = {1.0 + 0x1p-40, 1.0};
    const BlockEncoding enc = compress_block(values, 32);
    CHECK(enc.e_max == 1023);
    const auto expect = oracle::truncate_exact(values[0], enc.e_max, 32);
    CHECK(enc.codes[0] == expect.code);
    CHECK(kernels::decode_one(enc.codes[0], enc.e_max, 32) == 1.0);
    CHECK(expect.value == 1.0);
}

TEST_CASE("compress_block: non-finite input names the index") {
    std::vector<double> values = {1.0, 2.0,
                                  std::numeric_limits<double>::infinity(),
                                  0.5};
    CHECK_THROWS_WITH_AS(compress_block(values, 16),
                         "frsz2: non-finite value at index 2",
                         std::invalid_argument);
    values[2] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(compress_block(values, 16), std::invalid_argument);
}

TEST_CASE("compress: sizes") {
    SUBCASE("empty input") {
        const CompressedVector cv = compress({}, Frsz2Params{32, 32});
        CHECK(cv.size() == 0);
        CHECK(cv.exponents().empty());
        CHECK(cv.payload().empty());
    }
    SUBCASE("tail block rounds up") {
        const auto v = random_values(33, 1);
        const CompressedVector cv = compress(v, Frsz2Params{32, 32});
        CHECK(cv.exponents().size() == 2);
        CHECK(cv.payload().size() == 64);
    }
    SUBCASE("interleaved packing uses 21 words for l=21") {
        const auto v = random_values(32, 2);
        const CompressedVector cv = compress(v, Frsz2Params{32, 21});
        CHECK(cv.exponents().size() == 1);
        CHECK(cv.payload().size() == 21);
    }
}

TEST_CASE("decompress_value: fixed block") {
    const std::vector<double> values = {1.0, 0.5, 0.0, -0.25};
    const CompressedVector cv = compress(values, Frsz2Params{4, 32});
    CHECK(decompress_value(cv, 3) == -0.25);
    CHECK(decompress_value(cv, 1) == 0.5);
    CHECK(kernels::decode_one(0x20000000u, 1023, 32) == 0.5);
    CHECK_THROWS_AS(decompress_value(cv, 4), std::out_of_range);
}

TEST_CASE("decompress_block matches element access and round-trips") {
    for (uint32_t l : {16u, 21u, 32u, 7u, 50u}) {
        const auto v = random_values(100, 100 + l);
        const Frsz2Params params{32, l};
        const CompressedVector cv = compress(v, params);
        std::vector<double> buf(32);
        for (size_t b = 0; b < cv.num_blocks(); ++b) {
            decompress_block(cv, b, buf);
            for (size_t r = 0; r < 32 && b * 32 + r < cv.size(); ++r) {
                CHECK(same_double(buf[r], decompress_value(cv, b * 32 + r)));
            }
        }
        CHECK_THROWS_AS(decompress_block(cv, cv.num_blocks(), buf),
                        std::out_of_range);
    }
}

TEST_CASE("exact block round-trips exactly") {
    const std::vector<double> values = {1.0, 0.5, 0.0, -0.25};
    const CompressedVector cv = compress(values, Frsz2Params{4, 32});
    const auto back = decompress(cv);
    for (size_t i = 0; i < values.size(); ++i) {
        CHECK(back[i] == values[i]);
    }
    const std::vector<double> zeros(8, 0.0);
    const auto zcv = compress(zeros, Frsz2Params{4, 32});
    for (double z : decompress(zcv)) {
        CHECK(z == 0.0);
    }
}

TEST_CASE("negative zero keeps its sign") {
    const std::vector<double> values = {-0.0, 0.0, 1.0, -1.0};
    const CompressedVector cv = compress(values, Frsz2Params{4, 16});
    const auto back = decompress(cv);
    CHECK(std::signbit(back[0]));
    CHECK(back[0] == 0.0);
    CHECK(!std::signbit(back[1]));
}

TEST_CASE("subnormal inputs flush to signed zero") {
    const std::vector<double> values = {5e-320, -5e-320, 1.0, 2.0};
    const CompressedVector cv = compress(values, Frsz2Params{4, 32});
    const auto back = decompress(cv);
    CHECK(back[0] == 0.0);
    CHECK(back[1] == 0.0);
    CHECK(std::signbit(back[1]));
    CHECK(back[2] == 1.0);
}

TEST_CASE("round-trip idempotence: recompression is bit-identical") {
    for (uint32_t l : {2u, 16u, 21u, 32u, 47u, 64u}) {
        const auto v = random_values(257, 7000 + l, -100.0, 100.0);
        const Frsz2Params params{32, l};
        const CompressedVector cv = compress(v, params);
        const auto decoded = decompress(cv);
        const CompressedVector cv2 = compress(decoded, params);
        REQUIRE(cv.exponents().size() == cv2.exponents().size());
        for (size_t b = 0; b < cv.exponents().size(); ++b) {
            CHECK(cv.exponents()[b] == cv2.exponents()[b]);
        }
        REQUIRE(cv.payload().size() == cv2.payload().size());
        for (size_t w = 0; w < cv.payload().size(); ++w) {
            CHECK(cv.payload()[w] == cv2.payload()[w]);
        }
    }
}

TEST_CASE("error bound, magnitude and sign properties") {
    for (uint32_t l : {3u, 12u, 16u, 21u, 32u, 53u}) {
        const auto v = random_values(2048, 9000 + l);
        const Frsz2Params params{32, l};
        const CompressedVector cv = compress(v, params);
        const auto back = decompress(cv);
        for (size_t i = 0; i < v.size(); ++i) {
            const uint32_t e_max = cv.exponents()[i / 32];
            const double bound = max_abs_error_bound(e_max, l);
            CHECK(std::abs(v[i] - back[i]) < bound);
            CHECK(std::abs(back[i]) <= std::abs(v[i]));
            if (back[i] != 0.0) {
                CHECK(std::signbit(back[i]) == std::signbit(v[i]));
            }
        }
    }
}

TEST_CASE("exactness: values on the representable grid round-trip") {
    // Same exponent as e_max and few fraction bits.
    std::mt19937_64 rng(55);
    std::uniform_int_distribution<uint64_t> frac(0, (uint64_t{1} << 14) - 1);
    for (uint32_t l : {16u, 21u, 32u}) {
        std::vector<double> v(64);
        for (double& x : v) {
            // 1.frac with frac restricted to the top l-2 >= 14 bits.
            x = 1.0 + std::ldexp(static_cast<double>(frac(rng)), -14);
        }
        const CompressedVector cv = compress(v, Frsz2Params{32, l});
        const auto back = decompress(cv);
        for (size_t i = 0; i < v.size(); ++i) {
            CHECK(back[i] == v[i]);
        }
    }
}

TEST_CASE("random values match the exact truncation oracle bit for bit") {
    for (uint32_t l : {5u, 16u, 21u, 32u}) {
        const auto v = random_values(4096, 1234 + l, -10.0, 10.0);
        const Frsz2Params params{32, l};
        const CompressedVector cv = compress(v, params);
        const auto back = decompress(cv);
        for (size_t i = 0; i < v.size(); ++i) {
            const uint32_t e_max = cv.exponents()[i / 32];
            CHECK(e_max == oracle::block_emax(
                               std::span(v).subspan(i / 32 * 32,
                                                    std::min<size_t>(
                                                        32, v.size() -
                                                                i / 32 * 32))));
            const auto expect = oracle::truncate_exact(v[i], e_max, l);
            CHECK(same_double(back[i], expect.value));
        }
    }
}

TEST_CASE("brute-force oracle equivalence on small codes") {
    // Blocks of 4 drawn from an 8-value grid, l = 8: all 4096 combinations.
    const double grid[8] = {0.0,  -1.0, 0.8125, 2.5,
                            -0.3, 1.75, 0.0625, -3.9};
    const uint32_t l = 8;
    std::vector<double> block(4);
    for (int a = 0; a < 8; ++a) {
        for (int b = 0; b < 8; ++b) {
            for (int c = 0; c < 8; ++c) {
                for (int d = 0; d < 8; ++d) {
                    block = {grid[a], grid[b], grid[c], grid[d]};
                    const BlockEncoding enc = compress_block(block, l);
                    CHECK(enc.e_max == oracle::block_emax(block));
                    for (int i = 0; i < 4; ++i) {
                        CHECK(enc.codes[i] == oracle::brute_force_code(
                                                  block[i], enc.e_max, l));
                    }
                }
            }
        }
    }
}

TEST_CASE("brute-force oracle equivalence on random 8-value blocks, l=12") {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> dist(-4.0, 4.0);
    const uint32_t l = 12;
    std::vector<double> block(8);
    for (int trial = 0; trial < 200; ++trial) {
        for (double& x : block) {
            x = dist(rng);
        }
        const BlockEncoding enc = compress_block(block, l);
        for (size_t i = 0; i < block.size(); ++i) {
            CHECK(enc.codes[i] ==
                  oracle::brute_force_code(block[i], enc.e_max, l));
        }
    }
}

TEST_CASE("frsz2-21 stores a third less than frsz2-32") {
    for (size_t n : {32u, 320u, 4096u}) {
        const size_t b21 = storage_bytes(n, Frsz2Params{32, 21});
        const size_t b32 = storage_bytes(n, Frsz2Params{32, 32});
        CHECK(b21 * 3 == b32 * 2);  // 22 vs 33 words per block
    }
}

TEST_CASE("block locality: rewriting one block touches nothing else") {
    auto v = random_values(96, 77);
    const Frsz2Params params{32, 21};
    const CompressedVector before = compress(v, params);
    for (size_t i = 32; i < 64; ++i) {
        v[i] = -v[i] * 3.0;
    }
    const CompressedVector after = compress(v, params);
    const size_t wpb = params.words_per_block();
    for (size_t b = 0; b < 3; ++b) {
        const bool changed = b == 1;
        if (!changed) {
            CHECK(before.exponents()[b] == after.exponents()[b]);
            for (size_t w = 0; w < wpb; ++w) {
                CHECK(before.payload()[b * wpb + w] ==
                      after.payload()[b * wpb + w]);
            }
        }
    }
}

TEST_CASE("storage_bytes") {
    CHECK(storage_bytes(64, Frsz2Params{32, 32}) == 264);
    CHECK(storage_bytes(32, Frsz2Params{32, 21}) == 88);
    // 33 average bits per value for BS=32, l=32.
    CHECK(storage_bytes(32, Frsz2Params{32, 32}) * 8 / 32 == 33);
    CHECK(storage_bytes(0, Frsz2Params{32, 32}) == 0);
}

TEST_CASE("max_abs_error_bound") {
    CHECK(max_abs_error_bound(1023, 32) == 0x1p-30);
    CHECK(max_abs_error_bound(1023, 16) == 0x1p-14);
    for (uint32_t l = 3; l <= 52; ++l) {
        CHECK(max_abs_error_bound(1023, l) < max_abs_error_bound(1023, l - 1));
    }
}

TEST_CASE("params validation") {
    CHECK_THROWS_AS(compress({}, Frsz2Params{0, 32}), std::invalid_argument);
    CHECK_THROWS_AS(compress({}, Frsz2Params{32, 1}), std::invalid_argument);
    CHECK_THROWS_AS(compress({}, Frsz2Params{32, 65}), std::invalid_argument);
}

TEST_CASE("container round-trip and errors") {
    const auto v = random_values(100, 31415);
    for (uint32_t l : {16u, 21u, 32u}) {
        const CompressedVector cv = compress(v, Frsz2Params{32, l});
        std::stringstream ss;
        write_frsz2_file(ss, cv);
        const CompressedVector parsed = read_frsz2_file(ss);
        CHECK(parsed.size() == cv.size());
        const auto a = decompress(cv);
        const auto b = decompress(parsed);
        for (size_t i = 0; i < a.size(); ++i) {
            CHECK(same_double(a[i], b[i]));
        }
    }
    SUBCASE("bad magic") {
        std::stringstream ss("NOTFRSZ2 whatever");
        CHECK_THROWS_WITH_AS(read_frsz2_file(ss), "frsz2 container: bad magic",
                             std::runtime_error);
    }
    SUBCASE("truncated payload") {
        const CompressedVector cv = compress(v, Frsz2Params{32, 32});
        std::stringstream ss;
        write_frsz2_file(ss, cv);
        std::string data = ss.str();
        data.resize(data.size() - 5);
        std::stringstream cut(data);
        CHECK_THROWS_AS(read_frsz2_file(cut), std::runtime_error);
    }
    SUBCASE("trailing bytes rejected") {
        const CompressedVector cv = compress(v, Frsz2Params{32, 32});
        std::stringstream ss;
        write_frsz2_file(ss, cv);
        ss << 'x';
        CHECK_THROWS_AS(read_frsz2_file(ss), std::runtime_error);
    }
    SUBCASE("empty vector round-trips") {
        const CompressedVector cv = compress({}, Frsz2Params{32, 32});
        std::stringstream ss;
        write_frsz2_file(ss, cv);
        CHECK(read_frsz2_file(ss).size() == 0);
    }
}
