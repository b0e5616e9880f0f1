#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "linf1/linf1.hpp"
#include "linf1/matrix.hpp"

namespace linf1::mtl {

/// min 1/2 sum_k ||design * w_k - y_k||^2  s.t.  sum_m max_k |W_mk| <= radius.
/// design is n x M (samples x features), targets n x K (one column per task),
/// coefficients M x K; feature rows are the groups.
struct MtlProblem {
    Matrix design;
    Matrix targets;
    double radius = 1.0;
};

struct MtlResult {
    Matrix coefficients;
    /// Objective at W_0 followed by one entry per iteration.
    std::vector<double> objective_trace;
    /// sum_m max_k |W_mk| after each projection.
    std::vector<double> norm_trace;
    /// Wall time of each projector call.
    std::vector<double> projection_seconds;
    std::vector<double> step_trace;
    int iterations = 0;
    bool converged = false;
};

enum class StepPolicy { armijo, fixed };

struct PgdOptions {
    StepPolicy step = StepPolicy::armijo;
    int max_iter = 500;
    /// Stop once ||W_k - W_{k-1}||_F < tol.
    double tol = 1e-8;
    double armijo_c = 1e-4;
    int max_backtracks = 30;
    int power_iters = 100;
    /// Defaults to the zero matrix.
    std::optional<Matrix> initial;
    std::function<void(int, const Matrix&)> on_iterate;
};

/// C = A * B.
inline Matrix multiply(const Matrix& A, const Matrix& B)
{
    if (A.cols() != B.rows()) throw std::invalid_argument("multiply: inner dimension mismatch");
    Matrix C(A.rows(), B.cols());
    for (std::size_t i = 0; i < A.rows(); ++i) {
        auto c = C.row(i);
        for (std::size_t k = 0; k < A.cols(); ++k) {
            const double a = A(i, k);
            if (a == 0.0) continue;
            const auto b = B.row(k);
            for (std::size_t j = 0; j < c.size(); ++j) c[j] += a * b[j];
        }
    }
    return C;
}

/// C = A^T * B.
inline Matrix multiply_transposed(const Matrix& A, const Matrix& B)
{
    if (A.rows() != B.rows()) throw std::invalid_argument("multiply_transposed: row mismatch");
    Matrix C(A.cols(), B.cols());
    for (std::size_t k = 0; k < A.rows(); ++k) {
        const auto b = B.row(k);
        for (std::size_t i = 0; i < A.cols(); ++i) {
            const double a = A(k, i);
            if (a == 0.0) continue;
            auto c = C.row(i);
            for (std::size_t j = 0; j < c.size(); ++j) c[j] += a * b[j];
        }
    }
    return C;
}

namespace detail {

inline void check_shapes(const MtlProblem& p, const Matrix& coeffs)
{
    if (p.design.rows() != p.targets.rows() || p.design.cols() != coeffs.rows() ||
        p.targets.cols() != coeffs.cols()) {
        throw std::invalid_argument("mtl: shapes of design, targets and coefficients disagree");
    }
}

inline Matrix residual(const MtlProblem& p, const Matrix& coeffs)
{
    Matrix r = multiply(p.design, coeffs);
    const auto t = p.targets.data();
    auto d = r.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= t[i];
    return r;
}

inline double half_squared_norm(const Matrix& r)
{
    double s = 0.0;
    for (double x : r.data()) s += x * x;
    return 0.5 * s;
}

}  // namespace detail

/// 1/2 sum over tasks of ||design * coeffs_k - targets_k||^2.
inline double objective(const MtlProblem& p, const Matrix& coeffs)
{
    detail::check_shapes(p, coeffs);
    return detail::half_squared_norm(detail::residual(p, coeffs));
}

/// design^T (design * coeffs - targets), all tasks at once.
inline Matrix gradient(const MtlProblem& p, const Matrix& coeffs)
{
    detail::check_shapes(p, coeffs);
    return multiply_transposed(p.design, detail::residual(p, coeffs));
}

struct LipschitzEstimate {
    double value = 1.0;
    /// Set when design^T design is numerically zero and `value` is the floor.
    bool degenerate = false;
};

/// Power iteration for the top eigenvalue of design^T design, inflated by 1%.
inline LipschitzEstimate lipschitz_estimate(const Matrix& design, int iters)
{
    if (iters < 1) throw std::invalid_argument("lipschitz_estimate: iters must be >= 1");
    const std::size_t M = design.cols();
    Matrix v(M, 1);
    // Deterministic start with no symmetry that could hide the top eigenvector.
    for (std::size_t i = 0; i < M; ++i) v(i, 0) = 1.0 + 0.01 * static_cast<double>(i % 7);
    double eig = 0.0;
    for (int it = 0; it < iters; ++it) {
        const double vn = frobenius_norm(v);
        if (vn == 0.0) break;
        for (double& x : v.data()) x /= vn;
        Matrix w = multiply_transposed(design, multiply(design, v));
        double dot = 0.0;
        for (std::size_t i = 0; i < M; ++i) dot += v(i, 0) * w(i, 0);
        eig = dot;
        v = std::move(w);
    }
    if (!(eig > 1e-300)) return {1.0, true};
    return {1.01 * eig, false};
}

/// Projected gradient descent: W <- project(W - step * gradient(W)) until
/// ||W_k - W_{k-1}||_F < tol. `project` is any callable
/// (const Matrix&, double radius) -> ProjectionResult.
///
/// Armijo backtracking halves the step until
///   F(W+) <= F(W) + c <G, W+ - W>,
/// starting from twice the last accepted step. The fixed policy uses 1/L.
template <class Projector>
MtlResult pgd_solve(const MtlProblem& p, Projector&& project, const PgdOptions& opts = {})
{
    if (!(p.radius > 0.0)) throw std::invalid_argument("pgd_solve: radius must be positive");
    if (opts.max_iter < 1 || !(opts.tol > 0.0)) {
        throw std::invalid_argument("pgd_solve: max_iter >= 1 and tol > 0 required");
    }
    require_finite(p.design, "pgd_solve design");
    require_finite(p.targets, "pgd_solve targets");

    MtlResult res;
    Matrix W = opts.initial ? *opts.initial : Matrix(p.design.cols(), p.targets.cols());
    detail::check_shapes(p, W);

    const double L = lipschitz_estimate(p.design, opts.power_iters).value;
    double step = opts.step == StepPolicy::fixed ? 1.0 / L : 1.0;
    double F = objective(p, W);
    res.objective_trace.push_back(F);

    auto run_projection = [&](const Matrix& A) {
        const auto t0 = std::chrono::steady_clock::now();
        ProjectionResult pr = project(A, p.radius);
        res.projection_seconds.push_back(linf1::detail::elapsed_since(t0));
        if (!pr.converged) {
            throw std::runtime_error("pgd_solve: projector did not converge at iteration " +
                                     std::to_string(res.iterations));
        }
        return std::move(pr.X);
    };

    for (int k = 1; k <= opts.max_iter; ++k) {
        res.iterations = k;
        const Matrix G = gradient(p, W);
        if (!all_finite(G.data())) {
            throw std::runtime_error("pgd_solve: non-finite gradient at iteration " +
                                     std::to_string(k));
        }

        auto candidate = [&](double s) {
            Matrix A = W;
            auto a = A.data();
            const auto g = G.data();
            for (std::size_t i = 0; i < a.size(); ++i) a[i] -= s * g[i];
            return run_projection(A);
        };

        Matrix next;
        double F_next = 0.0;
        if (opts.step == StepPolicy::fixed) {
            next = candidate(step);
            F_next = objective(p, next);
        } else {
            step = std::min(2.0 * step, 1.0e12);
            bool accepted = false;
            for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
                next = candidate(step);
                F_next = objective(p, next);
                double inner = 0.0;
                const auto n = next.data();
                const auto w = W.data();
                const auto g = G.data();
                for (std::size_t i = 0; i < n.size(); ++i) inner += g[i] * (n[i] - w[i]);
                if (F_next <= F + opts.armijo_c * inner) {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) {
                // No decrease is representable any more. That is
                // convergence if a 1/L step barely moves W.
                res.iterations = k - 1;
                res.converged = frobenius_distance(candidate(1.0 / L), W) < opts.tol;
                break;
            }
        }

        const double change = frobenius_distance(next, W);
        W = std::move(next);
        F = F_next;
        res.objective_trace.push_back(F);
        res.norm_trace.push_back(norm_linf1(W));
        res.step_trace.push_back(step);
        if (opts.on_iterate) opts.on_iterate(k, W);
        if (change < opts.tol) {
            res.converged = true;
            break;
        }
    }
    res.coefficients = std::move(W);
    return res;
}

}  // namespace linf1::mtl
