// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace cbg {

using DenseVector = std::vector<double>;

/// Compressed sparse row matrix. Immutable in all kernels; col_idx is
/// strictly increasing within each row.
struct CsrMatrix {
    size_t n_rows = 0;
    size_t n_cols = 0;
    std::vector<size_t> row_ptrs;  // n_rows + 1 offsets
    std::vector<size_t> col_idx;
    std::vector<double> values;

    size_t nnz() const { return values.size(); }
    void validate() const;  // throws std::invalid_argument on any violation
};

/// y = A * x with per-row left-to-right accumulation.
DenseVector spmv(const CsrMatrix& a, std::span<const double> x);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);

/// Parse a MatrixMarket coordinate file (real, general or symmetric).
/// Symmetric entries are mirrored, duplicates summed, rows sorted.
/// Errors carry the 1-based line number.
CsrMatrix parse_matrix_market(std::istream& is);
void write_matrix_market(std::ostream& os, const CsrMatrix& a);

/// Deterministic test problem: s[i] = sin(i) for i in [0, n), the solution
/// is s normalized to unit 2-norm, and b = A * x_sol. Requires n >= 2.
std::pair<DenseVector, DenseVector> generate_problem(const CsrMatrix& a);

/// 5-point upwind convection-diffusion stencil on an nx-by-ny grid:
/// center 4 + 2*peclet, west/south -(1 + peclet), east/north -1.
/// peclet = 0 gives the symmetric Laplacian.
CsrMatrix gen_convdiff(size_t nx, size_t ny, double peclet);

/// Multiply row i by 10^(decades * i / (n_rows - 1)), spreading the row
/// magnitudes geometrically over the given number of decades.
void rescale_rows_geometric(CsrMatrix& a, double decades);

}  // namespace cbg
