// SPDX-License-Identifier: Apache-2.0

#include "cbg/sparse.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>

namespace cbg {

void CsrMatrix::validate() const {
    if (row_ptrs.size() != n_rows + 1 || row_ptrs.front() != 0 ||
        row_ptrs.back() != values.size() || col_idx.size() != values.size()) {
        throw std::invalid_argument("csr: inconsistent structure");
    }
    for (size_t r = 0; r < n_rows; ++r) {
        if (row_ptrs[r] > row_ptrs[r + 1]) {
            throw std::invalid_argument("csr: row_ptrs not nondecreasing");
        }
        for (size_t k = row_ptrs[r]; k < row_ptrs[r + 1]; ++k) {
            if (col_idx[k] >= n_cols) {
                throw std::invalid_argument("csr: column index out of range");
            }
            if (k > row_ptrs[r] && col_idx[k] <= col_idx[k - 1]) {
                throw std::invalid_argument(
                    "csr: columns not strictly increasing within a row");
            }
            if (!std::isfinite(values[k])) {
                throw std::invalid_argument("csr: non-finite value");
            }
        }
    }
}

DenseVector spmv(const CsrMatrix& a, std::span<const double> x) {
    if (x.size() != a.n_cols) {
        throw std::invalid_argument("spmv: dimension mismatch");
    }
    DenseVector y(a.n_rows);
    for (size_t r = 0; r < a.n_rows; ++r) {
        double sum = 0.0;
        for (size_t k = a.row_ptrs[r]; k < a.row_ptrs[r + 1]; ++k) {
            sum += a.values[k] * x[a.col_idx[k]];
        }
        y[r] = sum;
    }
    return y;
}

double dot(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("dot: length mismatch");
    }
    double sum = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sum += x[i] * y[i];
    }
    return sum;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("axpy: length mismatch");
    }
    for (size_t i = 0; i < x.size(); ++i) {
        y[i] += alpha * x[i];
    }
}

void scale(double alpha, std::span<double> x) {
    for (double& v : x) {
        v *= alpha;
    }
}

namespace {

[[noreturn]] void parse_fail(size_t line, const std::string& what) {
    throw std::runtime_error("matrix market: line " + std::to_string(line) +
                             ": " + what);
}

std::string lower(std::string s) {
    for (char& c : s) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return s;
}

double parse_double(const std::string& tok, size_t line) {
    double v = 0.0;
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    auto [p, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || p != end) {
        parse_fail(line, "bad numeric value '" + tok + "'");
    }
    return v;
}

}  // namespace

CsrMatrix parse_matrix_market(std::istream& is) {
    std::string line;
    size_t lineno = 0;
    if (!std::getline(is, line)) {
        parse_fail(1, "empty file");
    }
    ++lineno;
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (tag != "%%MatrixMarket") {
        parse_fail(lineno, "missing %%MatrixMarket banner");
    }
    object = lower(object);
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (object != "matrix" || format != "coordinate") {
        parse_fail(lineno, "only 'matrix coordinate' files are supported");
    }
    if (field != "real") {
        parse_fail(lineno, "unsupported field '" + field + "'");
    }
    const bool symmetric = symmetry == "symmetric";
    if (!symmetric && symmetry != "general") {
        parse_fail(lineno, "unsupported symmetry '" + symmetry + "'");
    }

    size_t n_rows = 0, n_cols = 0, nnz_decl = 0;
    for (;;) {
        if (!std::getline(is, line)) {
            parse_fail(lineno + 1, "missing size line");
        }
        ++lineno;
        if (!line.empty() && line[0] == '%') {
            continue;
        }
        std::istringstream sizes(line);
        if (!(sizes >> n_rows >> n_cols >> nnz_decl)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) {
                continue;  // blank line before sizes
            }
            parse_fail(lineno, "bad size line");
        }
        break;
    }

    std::vector<std::tuple<size_t, size_t, double>> entries;
    entries.reserve(symmetric ? 2 * nnz_decl : nnz_decl);
    size_t seen = 0;
    while (seen < nnz_decl) {
        if (!std::getline(is, line)) {
            parse_fail(lineno + 1, "unexpected end of file");
        }
        ++lineno;
        if (line.empty() || line[0] == '%' ||
            line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        std::istringstream entry(line);
        size_t i = 0, j = 0;
        std::string vtok;
        if (!(entry >> i >> j >> vtok)) {
            parse_fail(lineno, "bad entry");
        }
        const double v = parse_double(vtok, lineno);
        if (i < 1 || i > n_rows || j < 1 || j > n_cols) {
            parse_fail(lineno, "index out of bounds");
        }
        entries.emplace_back(i - 1, j - 1, v);
        if (symmetric && i != j) {
            entries.emplace_back(j - 1, i - 1, v);
        }
        ++seen;
    }

    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) {
                  return std::tie(std::get<0>(a), std::get<1>(a)) <
                         std::tie(std::get<0>(b), std::get<1>(b));
              });

    CsrMatrix a;
    a.n_rows = n_rows;
    a.n_cols = n_cols;
    a.row_ptrs.assign(n_rows + 1, 0);
    for (size_t k = 0; k < entries.size();) {
        const size_t r = std::get<0>(entries[k]);
        const size_t c = std::get<1>(entries[k]);
        double sum = 0.0;
        while (k < entries.size() && std::get<0>(entries[k]) == r &&
               std::get<1>(entries[k]) == c) {
            sum += std::get<2>(entries[k]);  // duplicates are summed
            ++k;
        }
        a.col_idx.push_back(c);
        a.values.push_back(sum);
        ++a.row_ptrs[r + 1];
    }
    for (size_t r = 0; r < n_rows; ++r) {
        a.row_ptrs[r + 1] += a.row_ptrs[r];
    }
    return a;
}

void write_matrix_market(std::ostream& os, const CsrMatrix& a) {
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << a.n_rows << " " << a.n_cols << " " << a.nnz() << "\n";
    char buf[64];
    for (size_t r = 0; r < a.n_rows; ++r) {
        for (size_t k = a.row_ptrs[r]; k < a.row_ptrs[r + 1]; ++k) {
            std::snprintf(buf, sizeof(buf), "%.17g", a.values[k]);
            os << (r + 1) << " " << (a.col_idx[k] + 1) << " " << buf << "\n";
        }
    }
    if (!os) {
        throw std::runtime_error("matrix market: write failed");
    }
}

std::pair<DenseVector, DenseVector> generate_problem(const CsrMatrix& a) {
    const size_t n = a.n_cols;
    if (n < 2) {
        throw std::invalid_argument(
            "generate_problem: need at least 2 unknowns");
    }
    DenseVector x(n);
    for (size_t i = 0; i < n; ++i) {
        x[i] = std::sin(static_cast<double>(i));
    }
    const double nrm = norm2(x);
    scale(1.0 / nrm, x);
    DenseVector b = spmv(a, x);
    return {std::move(b), std::move(x)};
}

CsrMatrix gen_convdiff(size_t nx, size_t ny, double peclet) {
    if (nx < 2 || ny < 2) {
        throw std::invalid_argument("gen_convdiff: grid must be at least 2x2");
    }
    if (!(peclet >= 0.0) || !std::isfinite(peclet)) {
        throw std::invalid_argument("gen_convdiff: peclet must be >= 0");
    }
    const size_t n = nx * ny;
    CsrMatrix a;
    a.n_rows = a.n_cols = n;
    a.row_ptrs.reserve(n + 1);
    a.row_ptrs.push_back(0);
    a.col_idx.reserve(5 * n);
    a.values.reserve(5 * n);
    const double center = 4.0 + 2.0 * peclet;
    const double upwind = -(1.0 + peclet);
    const double downwind = -1.0;
    for (size_t iy = 0; iy < ny; ++iy) {
        for (size_t ix = 0; ix < nx; ++ix) {
            const size_t idx = iy * nx + ix;
            if (iy > 0) {
                a.col_idx.push_back(idx - nx);
                a.values.push_back(upwind);
            }
            if (ix > 0) {
                a.col_idx.push_back(idx - 1);
                a.values.push_back(upwind);
            }
            a.col_idx.push_back(idx);
            a.values.push_back(center);
            if (ix + 1 < nx) {
                a.col_idx.push_back(idx + 1);
                a.values.push_back(downwind);
            }
            if (iy + 1 < ny) {
                a.col_idx.push_back(idx + nx);
                a.values.push_back(downwind);
            }
            a.row_ptrs.push_back(a.col_idx.size());
        }
    }
    return a;
}

void rescale_rows_geometric(CsrMatrix& a, double decades) {
    if (a.n_rows < 2) {
        throw std::invalid_argument("rescale_rows_geometric: need >= 2 rows");
    }
    for (size_t r = 0; r < a.n_rows; ++r) {
        const double factor = std::pow(
            10.0, decades * static_cast<double>(r) /
                      static_cast<double>(a.n_rows - 1));
        for (size_t k = a.row_ptrs[r]; k < a.row_ptrs[r + 1]; ++k) {
            a.values[k] *= factor;
        }
    }
}

}  // namespace cbg
