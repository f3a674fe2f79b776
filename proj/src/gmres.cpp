// SPDX-License-Identifier: Apache-2.0

#include "cbg/gmres.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace cbg {

void GmresConfig::validate() const {
    if (restart < 1) {
        throw std::invalid_argument("gmres: restart must be >= 1");
    }
    if (!(target_rrn > 0.0)) {
        throw std::invalid_argument("gmres: target_rrn must be > 0");
    }
    if (!(eta > 0.0 && eta < 1.0)) {
        throw std::invalid_argument("gmres: eta must be in (0, 1)");
    }
}

double rrn(const CsrMatrix& a, std::span<const double> x,
           std::span<const double> b) {
    const double nb = norm2(b);
    if (nb == 0.0) {
        throw std::invalid_argument("rrn: zero right-hand side");
    }
    DenseVector r = spmv(a, x);
    for (size_t i = 0; i < r.size(); ++i) {
        r[i] = b[i] - r[i];
    }
    return norm2(r) / nb;
}

ArnoldiStepResult arnoldi_orthogonalize(const KrylovBasis& basis, size_t cols,
                                        std::span<double> w,
                                        std::span<double> h, double eta) {
    if (h.size() < cols) {
        throw std::invalid_argument("arnoldi: coefficient span too small");
    }
    ArnoldiStepResult res{};
    res.omega = norm2(w);
    for (size_t i = 0; i < cols; ++i) {
        h[i] = basis.dot(i, w);
    }
    for (size_t i = 0; i < cols; ++i) {
        basis.subtract_scaled(i, h[i], w);
    }
    res.h_next = norm2(w);
    res.reorthogonalized = false;
    res.breakdown = false;
    if (res.h_next < eta * res.omega) {
        res.reorthogonalized = true;
        const double before = res.h_next;
        std::vector<double> u(cols);
        for (size_t i = 0; i < cols; ++i) {
            u[i] = basis.dot(i, w);
        }
        for (size_t i = 0; i < cols; ++i) {
            basis.subtract_scaled(i, u[i], w);
        }
        for (size_t i = 0; i < cols; ++i) {
            h[i] += u[i];
        }
        res.h_next = norm2(w);
        res.breakdown = res.h_next < eta * before;
    }
    res.breakdown = res.breakdown || res.h_next == 0.0;
    return res;
}

HessenbergLsq::HessenbergLsq(size_t max_cols) : max_cols_(max_cols) {
    r_.resize(max_cols_ * (max_cols_ + 1) / 2);
    cs_.resize(max_cols_);
    sn_.resize(max_cols_);
    g_.resize(max_cols_ + 1, 0.0);
}

void HessenbergLsq::reset(double beta) {
    cols_ = 0;
    std::fill(g_.begin(), g_.end(), 0.0);
    g_[0] = beta;
}

double HessenbergLsq::add_column(std::span<double> h_col) {
    const size_t j = cols_;
    if (j >= max_cols_ || h_col.size() != j + 2) {
        throw std::invalid_argument("lsq: bad column");
    }
    for (size_t i = 0; i < j; ++i) {
        const double t = cs_[i] * h_col[i] + sn_[i] * h_col[i + 1];
        h_col[i + 1] = -sn_[i] * h_col[i] + cs_[i] * h_col[i + 1];
        h_col[i] = t;
    }
    const double a = h_col[j];
    const double b = h_col[j + 1];
    double c = 1.0, s = 0.0, r = a;
    if (b != 0.0) {
        r = std::hypot(a, b);
        c = a / r;
        s = b / r;
    }
    cs_[j] = c;
    sn_[j] = s;
    double* col = r_.data() + j * (j + 1) / 2;
    for (size_t i = 0; i < j; ++i) {
        col[i] = h_col[i];
    }
    col[j] = r;
    g_[j + 1] = -s * g_[j];
    g_[j] = c * g_[j];
    ++cols_;
    return std::abs(g_[cols_]);
}

void HessenbergLsq::solve_y(std::span<double> y) const {
    if (y.size() != cols_) {
        throw std::invalid_argument("lsq: bad solution size");
    }
    for (size_t ii = cols_; ii-- > 0;) {
        double t = g_[ii];
        for (size_t k = ii + 1; k < cols_; ++k) {
            t -= r_at(ii, k) * y[k];
        }
        const double d = r_at(ii, ii);
        if (d == 0.0) {
            throw SolverBreakdown("gmres: singular triangular factor", ii);
        }
        y[ii] = t / d;
    }
}

void accumulate_solution(const KrylovBasis& basis, std::span<const double> y,
                         std::span<double> x) {
    for (size_t i = 0; i < y.size(); ++i) {
        basis.subtract_scaled(i, -y[i], x);
    }
}

SolveResult gmres_solve(const CsrMatrix& a, std::span<const double> b,
                        std::span<const double> x0, const GmresConfig& cfg) {
    cfg.validate();
    if (a.n_rows != a.n_cols) {
        throw std::invalid_argument("gmres: matrix must be square");
    }
    const size_t n = a.n_rows;
    if (b.size() != n || x0.size() != n) {
        throw std::invalid_argument("gmres: dimension mismatch");
    }

    SolveResult result;
    const auto t_start = std::chrono::steady_clock::now();
    const auto stop_clock = [&] {
        result.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          t_start)
                .count();
    };

    const double norm_b = norm2(b);
    if (norm_b == 0.0) {
        result.converged = true;
        result.final_rrn = 0.0;
        result.solution.assign(n, 0.0);
        result.residual_history.push_back({0, 0.0, true});
        stop_clock();
        return result;
    }

    const size_t m = cfg.restart;
    DenseVector x(x0.begin(), x0.end());
    KrylovBasis basis(n, m + 1, cfg.storage_format);
    HessenbergLsq lsq(m);
    DenseVector v(n), w(n), h_col(m + 2), y(m);
    size_t iter = 0;
    size_t cycles = 0;

    for (;;) {
        // Explicit residual: the only value convergence is declared on.
        DenseVector r = spmv(a, x);
        for (size_t i = 0; i < n; ++i) {
            r[i] = b[i] - r[i];
        }
        const double beta = norm2(r);
        const double explicit_rrn = beta / norm_b;
        if (!std::isfinite(explicit_rrn)) {
            throw SolverBreakdown("gmres: non-finite residual", iter);
        }
        result.residual_history.push_back({iter, explicit_rrn, true});
        if (explicit_rrn <= cfg.target_rrn) {
            result.converged = true;
            break;
        }
        if (iter >= cfg.max_total_iterations) {
            result.converged = false;
            break;
        }

        ++cycles;
        lsq.reset(beta);
        v = r;
        scale(1.0 / beta, v);
        basis.write_vector(0, v);

        size_t used = 0;
        bool cycle_done = false;
        while (!cycle_done && used < m && iter < cfg.max_total_iterations) {
            ++iter;
            w = spmv(a, v);
            const auto step = arnoldi_orthogonalize(
                basis, used + 1, w, std::span(h_col).subspan(0, used + 1),
                cfg.eta);
            if (!std::isfinite(step.omega) || !std::isfinite(step.h_next)) {
                throw SolverBreakdown("gmres: non-finite Arnoldi step", iter);
            }
            h_col[used + 1] = step.h_next;
            for (size_t i = 0; i <= used + 1; ++i) {
                if (!std::isfinite(h_col[i])) {
                    throw SolverBreakdown("gmres: non-finite Hessenberg entry",
                                          iter);
                }
            }
            const double estimate = lsq.add_column(
                std::span(h_col).subspan(0, used + 2));
            ++used;
            const double implicit_rrn = estimate / norm_b;

            const bool truncated = step.breakdown;
            if (!truncated) {
                scale(1.0 / step.h_next, w);
                v = w;
                basis.write_vector(used, v);
            }
            cycle_done = truncated || implicit_rrn <= cfg.target_rrn ||
                         used == m || iter >= cfg.max_total_iterations;
            if (!cycle_done) {
                result.residual_history.push_back({iter, implicit_rrn, false});
            }
        }

        lsq.solve_y(std::span(y).subspan(0, used));
        accumulate_solution(basis, std::span<const double>(y.data(), used), x);
    }

    result.total_iterations = iter;
    result.restarts = cycles > 0 ? cycles - 1 : 0;
    result.final_rrn = result.residual_history.back().rrn;
    result.solution = std::move(x);
    stop_clock();
    return result;
}

}  // namespace cbg
