// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cbg/gmres.hpp"

namespace cbg::cli {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;         // usage or input error
inline constexpr int kExitNotConverged = 2;  // solve only

/// Summary of one solver run, printed as a single key=value line.
struct RunRecord {
    std::string matrix;
    std::string format;
    double target_rrn = 0.0;
    size_t iterations = 0;
    size_t restarts = 0;
    bool converged = false;
    double final_rrn = 0.0;
    double wall_seconds = 0.0;
    double wall_mean_seconds = 0.0;
    double wall_min_seconds = 0.0;
    int repeats = 1;
};

struct SolveOptions {
    std::string matrix_path;  // empty when generating
    bool gen_convdiff = false;
    size_t nx = 0, ny = 0;
    double peclet = 0.0;
    double row_scale_decades = 0.0;
    std::string format = "f64";
    double target_rrn = 1e-10;
    size_t restart = 100;
    size_t max_iters = 20000;
    double eta = 0.70710678118654752;
    int repeat = 1;
    std::string residuals_path = "residuals.csv";
};

struct CodecOptions {
    enum class Mode { compress, decompress, roundtrip };
    Mode mode = Mode::roundtrip;
    std::string input;
    std::string output;  // unused for roundtrip
    uint32_t block_size = 32;
    uint32_t bit_length = 32;
};

struct BenchOptions {
    int log2_elements = 28;
    std::vector<std::string> formats = {"f64", "f32",      "f16",
                                        "frsz2-16", "frsz2-21", "frsz2-32"};
    std::vector<int> intensities = {1, 2, 4, 8, 16, 32, 64, 128};
    int trials = 10;
    uint64_t seed = 42;
    std::string out_csv = "bench.csv";
};

struct AnalyzeOptions {
    std::string matrix_path;  // one of matrix_path / vector_path
    std::string vector_path;
    int bins = 64;
    std::string out_prefix = "analyze";
};

struct GenConvdiffOptions {
    size_t nx = 0, ny = 0;
    double peclet = 0.0;
    double row_scale_decades = 0.0;
    std::string out;
};

int cmd_solve(const SolveOptions& opt, std::ostream& out, std::ostream& err);
int cmd_codec(const CodecOptions& opt, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err);
int cmd_analyze(const AnalyzeOptions& opt, std::ostream& out,
                std::ostream& err);
int cmd_gen_convdiff(const GenConvdiffOptions& opt, std::ostream& out,
                     std::ostream& err);

void write_residuals_csv(std::ostream& os,
                         const std::vector<ResidualRecord>& history);

}  // namespace cbg::cli
