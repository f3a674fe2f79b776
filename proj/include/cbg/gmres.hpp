// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbg/basis.hpp"
#include "cbg/sparse.hpp"

namespace cbg {

struct GmresConfig {
    size_t restart = 100;
    double target_rrn = 1e-10;
    size_t max_total_iterations = 20000;
    // Re-orthogonalization threshold of the classical Gram-Schmidt step;
    // one extra pass runs when h_{j+1,j} < eta * ||w||.
    double eta = 0.70710678118654752;
    StorageFormat storage_format = StorageFormat::f64();

    void validate() const;
};

struct ResidualRecord {
    size_t iteration;
    double rrn;
    // True when the residual was recomputed as ||b - A x|| / ||b||; false
    // for the incremental least-squares estimate.
    bool is_explicit;
};

struct SolveResult {
    bool converged = false;
    size_t total_iterations = 0;
    size_t restarts = 0;
    double final_rrn = std::numeric_limits<double>::quiet_NaN();
    std::vector<ResidualRecord> residual_history;
    double wall_seconds = 0.0;
    DenseVector solution;
};

/// Non-finite intermediate values or a singular least-squares factor.
class SolverBreakdown : public std::runtime_error {
public:
    SolverBreakdown(const std::string& what, size_t iteration)
        : std::runtime_error(what), iteration(iteration) {}
    size_t iteration;
};

/// Relative residual norm ||b - A x||_2 / ||b||_2. Throws on ||b|| = 0.
double rrn(const CsrMatrix& a, std::span<const double> x,
           std::span<const double> b);

struct ArnoldiStepResult {
    double omega;   // ||w|| before orthogonalization
    double h_next;  // ||w|| after orthogonalization (and re-orth, if any)
    bool reorthogonalized;
    // h_next == 0, or the re-orthogonalization pass again shrank the norm
    // below eta times its input: the new direction is linearly dependent
    // and the cycle must truncate.
    bool breakdown;
};

/// Classical Gram-Schmidt of w against the first cols columns of basis,
/// with at most one re-orthogonalization pass when h_next < eta * omega.
/// Each eta comparison is against the norm entering that pass.
/// h receives the cols projection coefficients; w is updated in place.
ArnoldiStepResult arnoldi_orthogonalize(const KrylovBasis& basis, size_t cols,
                                        std::span<double> w,
                                        std::span<double> h, double eta);

/// Incremental Givens QR of the least-squares problem min ||beta e1 - H y||
/// for a Hessenberg H built one column at a time.
class HessenbergLsq {
public:
    explicit HessenbergLsq(size_t max_cols);

    void reset(double beta);
    /// Feed column j (entries for rows 0..j+1, so h_col.size() == cols()+2):
    /// applies the previous rotations, annihilates the subdiagonal entry,
    /// updates the rotated right-hand side, and returns |g[j+1]|, the
    /// residual norm of the current least-squares problem.
    double add_column(std::span<double> h_col);
    size_t cols() const { return cols_; }
    double residual_estimate() const { return std::abs(g_[cols_]); }
    /// Back-substitute for y (size cols()). Throws SolverBreakdown on a
    /// zero diagonal.
    void solve_y(std::span<double> y) const;

private:
    size_t max_cols_;
    size_t cols_ = 0;
    std::vector<double> r_;  // packed upper-triangular columns
    std::vector<double> cs_, sn_, g_;

    double r_at(size_t row, size_t col) const {
        return r_[col * (col + 1) / 2 + row];
    }
};

/// x += sum_i y[i] * basis column i, reading through the storage format.
void accumulate_solution(const KrylovBasis& basis, std::span<const double> y,
                         std::span<double> x);

/// Restarted GMRES with the Krylov basis stored in cfg.storage_format.
/// Residuals are tracked incrementally within a cycle; every restart and
/// the final state recompute the residual explicitly, and convergence is
/// declared only on the explicit value.
SolveResult gmres_solve(const CsrMatrix& a, std::span<const double> b,
                        std::span<const double> x0, const GmresConfig& cfg);

}  // namespace cbg
