// SPDX-License-Identifier: Apache-2.0

#include "cbg/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "cbg/bench.hpp"
#include "cbg/frsz2.hpp"
#include "cbg/sparse.hpp"

namespace cbg::cli {
namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string basename_of(const std::string& path) {
    const size_t pos = path.find_last_of("/\\");
    return pos == std::string::npos ? path : path.substr(pos + 1);
}

std::vector<double> read_raw_f64(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    in.seekg(0, std::ios::end);
    const auto bytes = static_cast<size_t>(in.tellg());
    in.seekg(0);
    if (bytes % 8 != 0) {
        throw std::runtime_error(path + ": size is not a multiple of 8");
    }
    std::vector<double> values(bytes / 8);
    if (!in.read(reinterpret_cast<char*>(values.data()),
                 static_cast<std::streamsize>(bytes))) {
        throw std::runtime_error(path + ": read failed");
    }
    return values;
}

void write_raw_f64(const std::string& path, std::span<const double> values) {
    std::ofstream out(path, std::ios::binary);
    if (!out.write(reinterpret_cast<const char*>(values.data()),
                   static_cast<std::streamsize>(values.size() * 8))) {
        throw std::runtime_error(path + ": write failed");
    }
}

struct NamedMatrix {
    std::string name;
    CsrMatrix matrix;
};

NamedMatrix load_solve_matrix(const SolveOptions& opt) {
    NamedMatrix nm;
    if (opt.gen_convdiff) {
        nm.matrix = gen_convdiff(opt.nx, opt.ny, opt.peclet);
        std::ostringstream name;
        name << "convdiff-" << opt.nx << "x" << opt.ny << "-pe" << opt.peclet;
        nm.name = name.str();
    } else {
        std::ifstream in(opt.matrix_path);
        if (!in) {
            throw std::runtime_error("cannot open " + opt.matrix_path);
        }
        nm.matrix = parse_matrix_market(in);
        nm.name = basename_of(opt.matrix_path);
    }
    if (opt.row_scale_decades != 0.0) {
        rescale_rows_geometric(nm.matrix, opt.row_scale_decades);
        nm.name += "-rs" + fmt_double(opt.row_scale_decades);
    }
    return nm;
}

}  // namespace

void write_residuals_csv(std::ostream& os,
                         const std::vector<ResidualRecord>& history) {
    os << "iteration,rrn,explicit\n";
    for (const ResidualRecord& rec : history) {
        os << rec.iteration << "," << fmt_double(rec.rrn) << ","
           << (rec.is_explicit ? 1 : 0) << "\n";
    }
}

int cmd_solve(const SolveOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        const auto fmt = StorageFormat::parse(opt.format);
        if (!fmt) {
            err << "unknown storage format '" << opt.format << "'\n";
            return kExitError;
        }
        if (opt.repeat < 1) {
            err << "--repeat must be >= 1\n";
            return kExitError;
        }
        NamedMatrix nm = load_solve_matrix(opt);
        if (nm.matrix.n_rows != nm.matrix.n_cols) {
            err << "matrix must be square\n";
            return kExitError;
        }
        auto [b, x_sol] = generate_problem(nm.matrix);
        (void)x_sol;
        DenseVector x0(nm.matrix.n_cols, 0.0);

        GmresConfig cfg;
        cfg.restart = opt.restart;
        cfg.target_rrn = opt.target_rrn;
        cfg.max_total_iterations = opt.max_iters;
        cfg.eta = opt.eta;
        cfg.storage_format = *fmt;

        SolveResult result;
        double wall_sum = 0.0;
        double wall_min = std::numeric_limits<double>::infinity();
        for (int run = 0; run < opt.repeat; ++run) {
            result = gmres_solve(nm.matrix, b, x0, cfg);
            wall_sum += result.wall_seconds;
            wall_min = std::min(wall_min, result.wall_seconds);
        }

        std::ofstream csv(opt.residuals_path);
        if (!csv) {
            err << "cannot write " << opt.residuals_path << "\n";
            return kExitError;
        }
        write_residuals_csv(csv, result.residual_history);

        RunRecord rec;
        rec.matrix = nm.name;
        rec.format = fmt->name();
        rec.target_rrn = opt.target_rrn;
        rec.iterations = result.total_iterations;
        rec.restarts = result.restarts;
        rec.converged = result.converged;
        rec.final_rrn = result.final_rrn;
        rec.wall_seconds = result.wall_seconds;
        rec.wall_mean_seconds = wall_sum / opt.repeat;
        rec.wall_min_seconds = wall_min;
        rec.repeats = opt.repeat;

        out << "matrix=" << rec.matrix << " format=" << rec.format
            << " target_rrn=" << fmt_double(rec.target_rrn)
            << " converged=" << (rec.converged ? 1 : 0)
            << " iterations=" << rec.iterations
            << " restarts=" << rec.restarts
            << " final_rrn=" << fmt_double(rec.final_rrn)
            << " wall_s=" << fmt_double(rec.wall_seconds);
        if (rec.repeats > 1) {
            out << " wall_mean_s=" << fmt_double(rec.wall_mean_seconds)
                << " wall_min_s=" << fmt_double(rec.wall_min_seconds);
        }
        out << "\n";
        return rec.converged ? kExitOk : kExitNotConverged;
    } catch (const std::exception& e) {
        err << "solve: " << e.what() << "\n";
        return kExitError;
    }
}

int cmd_codec(const CodecOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        const Frsz2Params params{opt.block_size, opt.bit_length};
        params.validate();
        switch (opt.mode) {
        case CodecOptions::Mode::compress: {
            const auto values = read_raw_f64(opt.input);
            const CompressedVector cv = compress(values, params);
            std::ofstream os(opt.output, std::ios::binary);
            if (!os) {
                throw std::runtime_error("cannot write " + opt.output);
            }
            write_frsz2_file(os, cv);
            out << "compressed " << values.size() << " values to "
                << storage_bytes(values.size(), params)
                << " payload bytes (+24-byte header)\n";
            return kExitOk;
        }
        case CodecOptions::Mode::decompress: {
            std::ifstream is(opt.input, std::ios::binary);
            if (!is) {
                throw std::runtime_error("cannot open " + opt.input);
            }
            const CompressedVector cv = read_frsz2_file(is);
            write_raw_f64(opt.output, decompress(cv));
            out << "decompressed " << cv.size() << " values\n";
            return kExitOk;
        }
        case CodecOptions::Mode::roundtrip: {
            const auto values = read_raw_f64(opt.input);
            const CompressedVector cv = compress(values, params);
            const auto decoded = decompress(cv);
            double max_err = 0.0;
            for (size_t i = 0; i < values.size(); ++i) {
                max_err = std::max(max_err,
                                   std::abs(values[i] - decoded[i]));
            }
            double max_bound = 0.0;
            for (uint32_t e : cv.exponents()) {
                max_bound = std::max(max_bound,
                                     max_abs_error_bound(e, params.bit_length));
            }
            out << "values=" << values.size()
                << " raw_bytes=" << values.size() * 8
                << " compressed_bytes=" << storage_bytes(values.size(), params)
                << " header_bytes=24"
                << " max_abs_error=" << fmt_double(max_err)
                << " max_error_bound=" << fmt_double(max_bound) << "\n";
            return kExitOk;
        }
        }
        return kExitError;
    } catch (const std::exception& e) {
        err << "codec: " << e.what() << "\n";
        return kExitError;
    }
}

int cmd_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        if (opt.log2_elements < 5 || opt.log2_elements > 32) {
            err << "--log2-elements must be in [5, 32]\n";
            return kExitError;
        }
        std::vector<StorageFormat> formats;
        for (const std::string& name : opt.formats) {
            const auto fmt = StorageFormat::parse(name);
            if (!fmt) {
                err << "unknown storage format '" << name << "'\n";
                return kExitError;
            }
            formats.push_back(*fmt);
        }
        const size_t elements = size_t{1} << opt.log2_elements;
        const auto results = run_read_benchmark(
            elements, formats, opt.intensities, opt.trials, opt.seed);

        std::ofstream csv(opt.out_csv);
        if (!csv) {
            err << "cannot write " << opt.out_csv << "\n";
            return kExitError;
        }
        csv << "format,intensity,elements,stored_bytes,seconds,stored_gbps,"
               "logical_gbps\n";
        for (const BenchResult& r : results) {
            csv << r.format << "," << r.intensity << "," << r.elements << ","
                << r.stored_bytes << "," << fmt_double(r.seconds) << ","
                << fmt_double(r.stored_gbps) << ","
                << fmt_double(r.logical_gbps) << "\n";
            out << r.format << " intensity=" << r.intensity
                << " stored_gbps=" << fmt_double(r.stored_gbps)
                << " logical_gbps=" << fmt_double(r.logical_gbps) << "\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        err << "bench: " << e.what() << "\n";
        return kExitError;
    }
}

int cmd_analyze(const AnalyzeOptions& opt, std::ostream& out,
                std::ostream& err) {
    try {
        if (opt.bins < 1) {
            err << "--bins must be >= 1\n";
            return kExitError;
        }
        std::vector<double> values;
        if (!opt.matrix_path.empty()) {
            std::ifstream in(opt.matrix_path);
            if (!in) {
                throw std::runtime_error("cannot open " + opt.matrix_path);
            }
            values = parse_matrix_market(in).values;
        } else if (!opt.vector_path.empty()) {
            values = read_raw_f64(opt.vector_path);
        } else {
            err << "one of --matrix / --vector is required\n";
            return kExitError;
        }
        if (values.empty()) {
            err << "input holds no values\n";
            return kExitError;
        }

        // Value histogram over the observed range.
        double lo = values[0], hi = values[0];
        for (double v : values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const int bins = lo == hi ? 1 : opt.bins;
        std::vector<size_t> value_hist(bins, 0);
        const double width = (hi - lo) / bins;
        for (double v : values) {
            int idx = 0;
            if (bins > 1) {
                idx = std::min(bins - 1,
                               static_cast<int>((v - lo) / width));
            }
            ++value_hist[idx];
        }
        std::ofstream vcsv(opt.out_prefix + "_values.csv");
        if (!vcsv) {
            throw std::runtime_error("cannot write value histogram");
        }
        vcsv << "bin_lo,bin_hi,count\n";
        for (int i = 0; i < bins; ++i) {
            const double blo = bins == 1 ? lo : lo + i * width;
            const double bhi = bins == 1 ? hi : lo + (i + 1) * width;
            vcsv << fmt_double(blo) << "," << fmt_double(bhi) << ","
                 << value_hist[i] << "\n";
        }

        // Base-2 exponent histogram of the nonzero values.
        int emin = std::numeric_limits<int>::max();
        int emax = std::numeric_limits<int>::min();
        size_t nonzero = 0;
        for (double v : values) {
            if (v != 0.0) {
                const int e = std::ilogb(v);
                emin = std::min(emin, e);
                emax = std::max(emax, e);
                ++nonzero;
            }
        }
        std::ofstream ecsv(opt.out_prefix + "_exponents.csv");
        if (!ecsv) {
            throw std::runtime_error("cannot write exponent histogram");
        }
        ecsv << "exponent,count\n";
        if (nonzero == 0) {
            out << "no nonzero values\n";
            return kExitOk;
        }
        std::vector<size_t> exp_hist(emax - emin + 1, 0);
        for (double v : values) {
            if (v != 0.0) {
                ++exp_hist[std::ilogb(v) - emin];
            }
        }
        for (int e = emin; e <= emax; ++e) {
            ecsv << e << "," << exp_hist[e - emin] << "\n";
        }
        out << "values=" << values.size() << " nonzero=" << nonzero
            << " exponent_min=" << emin << " exponent_max=" << emax << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        err << "analyze: " << e.what() << "\n";
        return kExitError;
    }
}

int cmd_gen_convdiff(const GenConvdiffOptions& opt, std::ostream& out,
                     std::ostream& err) {
    try {
        CsrMatrix a = gen_convdiff(opt.nx, opt.ny, opt.peclet);
        if (opt.row_scale_decades != 0.0) {
            rescale_rows_geometric(a, opt.row_scale_decades);
        }
        std::ofstream os(opt.out);
        if (!os) {
            throw std::runtime_error("cannot write " + opt.out);
        }
        write_matrix_market(os, a);
        out << "wrote " << a.n_rows << "x" << a.n_cols << " matrix with "
            << a.nnz() << " nonzeros to " << opt.out << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        err << "gen-convdiff: " << e.what() << "\n";
        return kExitError;
    }
}

}  // namespace cbg::cli
