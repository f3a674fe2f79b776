// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cbg/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"frsz2 block floating-point codec and compressed-basis "
                 "GMRES solver"};
    app.require_subcommand(1);

    // solve
    cbg::cli::SolveOptions solve_opt;
    CLI::App* solve = app.add_subcommand(
        "solve", "solve a linear system with restarted GMRES");
    auto* mx = solve->add_option("--matrix", solve_opt.matrix_path,
                                 "MatrixMarket file");
    auto* gen = solve->add_flag("--gen-convdiff", solve_opt.gen_convdiff,
                                "generate a convection-diffusion system");
    mx->excludes(gen);
    solve->add_option("--nx", solve_opt.nx, "grid size x (with --gen-convdiff)");
    solve->add_option("--ny", solve_opt.ny, "grid size y (with --gen-convdiff)");
    solve->add_option("--peclet", solve_opt.peclet, "convection strength");
    solve->add_option("--row-scale-decades", solve_opt.row_scale_decades,
                      "geometric row rescaling in decades");
    solve->add_option("--format", solve_opt.format,
                      "basis storage format: f64|f32|f16|frsz2-16|frsz2-21|"
                      "frsz2-32");
    solve->add_option("--target-rrn", solve_opt.target_rrn,
                      "relative residual norm to reach");
    solve->add_option("--restart", solve_opt.restart, "restart length m");
    solve->add_option("--max-iters", solve_opt.max_iters,
                      "total iteration cap");
    solve->add_option("--eta", solve_opt.eta,
                      "re-orthogonalization threshold");
    solve->add_option("--repeat", solve_opt.repeat,
                      "number of timed repetitions");
    solve->add_option("--residuals", solve_opt.residuals_path,
                      "residual history CSV path");

    // codec
    cbg::cli::CodecOptions codec_opt;
    CLI::App* codec = app.add_subcommand("codec", "frsz2 codec utilities");
    codec->require_subcommand(1);
    CLI::App* codec_compress =
        codec->add_subcommand("compress", "raw f64 file -> frsz2 container");
    CLI::App* codec_decompress =
        codec->add_subcommand("decompress", "frsz2 container -> raw f64 file");
    CLI::App* codec_roundtrip = codec->add_subcommand(
        "roundtrip", "compress+decompress, print error and size report");
    for (CLI::App* sub : {codec_compress, codec_decompress, codec_roundtrip}) {
        sub->add_option("--input", codec_opt.input, "input file")->required();
        if (sub != codec_roundtrip) {
            sub->add_option("--output", codec_opt.output, "output file")
                ->required();
        }
        if (sub != codec_decompress) {
            sub->add_option("--bs", codec_opt.block_size, "block size");
            sub->add_option("--bits", codec_opt.bit_length,
                            "bits per value (2..64)");
        }
    }

    // bench
    cbg::cli::BenchOptions bench_opt;
    CLI::App* bench = app.add_subcommand(
        "bench", "streaming read throughput across storage formats");
    bench->add_option("--log2-elements", bench_opt.log2_elements,
                      "log2 of the element count (default 28)");
    bench->add_option("--formats", bench_opt.formats, "formats to measure")
        ->delimiter(',');
    bench->add_option("--intensities", bench_opt.intensities,
                      "multiply-adds per value")
        ->delimiter(',');
    bench->add_option("--trials", bench_opt.trials, "timed runs per point");
    bench->add_option("--seed", bench_opt.seed, "data seed");
    bench->add_option("--out", bench_opt.out_csv, "CSV output path");

    // analyze
    cbg::cli::AnalyzeOptions analyze_opt;
    CLI::App* analyze = app.add_subcommand(
        "analyze", "value and base-2 exponent histograms");
    auto* amx =
        analyze->add_option("--matrix", analyze_opt.matrix_path,
                            "MatrixMarket file (histograms of the nonzeros)");
    analyze->add_option("--vector", analyze_opt.vector_path,
                        "raw little-endian f64 file")
        ->excludes(amx);
    analyze->add_option("--bins", analyze_opt.bins, "value histogram bins");
    analyze->add_option("--out-prefix", analyze_opt.out_prefix,
                        "output CSV prefix");

    // gen-convdiff
    cbg::cli::GenConvdiffOptions gen_opt;
    CLI::App* genc = app.add_subcommand(
        "gen-convdiff", "write a convection-diffusion matrix as MatrixMarket");
    genc->add_option("--nx", gen_opt.nx, "grid size x")->required();
    genc->add_option("--ny", gen_opt.ny, "grid size y")->required();
    genc->add_option("--peclet", gen_opt.peclet, "convection strength");
    genc->add_option("--row-scale-decades", gen_opt.row_scale_decades,
                     "geometric row rescaling in decades");
    genc->add_option("--out", gen_opt.out, "output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : cbg::cli::kExitError;
    }

    if (solve->parsed()) {
        return cbg::cli::cmd_solve(solve_opt, std::cout, std::cerr);
    }
    if (codec->parsed()) {
        if (codec_compress->parsed()) {
            codec_opt.mode = cbg::cli::CodecOptions::Mode::compress;
        } else if (codec_decompress->parsed()) {
            codec_opt.mode = cbg::cli::CodecOptions::Mode::decompress;
        } else {
            codec_opt.mode = cbg::cli::CodecOptions::Mode::roundtrip;
        }
        return cbg::cli::cmd_codec(codec_opt, std::cout, std::cerr);
    }
    if (bench->parsed()) {
        return cbg::cli::cmd_bench(bench_opt, std::cout, std::cerr);
    }
    if (analyze->parsed()) {
        return cbg::cli::cmd_analyze(analyze_opt, std::cout, std::cerr);
    }
    if (genc->parsed()) {
        return cbg::cli::cmd_gen_convdiff(gen_opt, std::cout, std::cerr);
    }
    return cbg::cli::kExitError;
}
