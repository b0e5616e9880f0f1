#pragma once

// Slow reference solver and optimality checker. Shares nothing with the
// production projectors except the sort-based l1 kernel.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "linf1/l1ball.hpp"
#include "linf1/matrix.hpp"

namespace linf1::oracle {

struct BisectResult {
    Matrix X;
    double gamma_star = 0.0;
    int iterations = 0;
};

namespace detail {

inline double row_threshold_sorted(std::span<const double> row, double gamma)
{
    if (l1_norm(row) <= gamma) return 0.0;
    return l1_threshold_sort(row, gamma).threshold;
}

inline double search_value(const Matrix& B, double tau, double gamma)
{
    double s = -tau;
    for (std::size_t m = 0; m < B.rows(); ++m) s += row_threshold_sorted(B.row(m), gamma);
    return s;
}

}  // namespace detail

/// Bisection on f(gamma) over [0, max_m ||b_m||_1] until the bracket is
/// narrower than eps (default 1e-13 * max_m ||b_m||_1).
inline BisectResult bisect_project(const Matrix& B, double tau, double eps = 0.0)
{
    if (!(tau >= 0.0)) throw std::invalid_argument("bisect_project: tau must be nonnegative");
    if (norm_linf1(B) <= tau) return {B, 0.0, 0};

    double lo = 0.0;
    double hi = norm_l1inf(B);
    if (!(eps > 0.0)) eps = 1e-13 * hi;
    int it = 0;
    while (hi - lo > eps) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (detail::search_value(B, tau, mid) >= 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        ++it;
    }
    const double gamma = 0.5 * (lo + hi);

    Matrix X(B.rows(), B.cols());
    for (std::size_t m = 0; m < B.rows(); ++m) {
        const double lam = detail::row_threshold_sorted(B.row(m), gamma);
        for (std::size_t i = 0; i < B.cols(); ++i) {
            const double b = B(m, i);
            X(m, i) = std::abs(b) > lam ? std::copysign(lam, b) : b;
        }
        if (lam == 0.0) {
            for (std::size_t i = 0; i < B.cols(); ++i) X(m, i) = 0.0;
        }
    }
    return {std::move(X), gamma, it};
}

enum class KktClause {
    none,
    norm,        ///< (a) | ||X||_inf,1 - tau | <= tol
    clamp,       ///< (b) each row is zero or a clamp of its input row
    level_sum,   ///< (c) clamp levels sum to tau
    zero_rows,   ///< (d) zero rows have ||b_m||_1 <= gamma + tol
    dual_radius, ///< (e) every nonzero row has ||b_m - x_m||_1 = gamma
    shape,
};

inline const char* to_string(KktClause c)
{
    switch (c) {
    case KktClause::none: return "none";
    case KktClause::norm: return "norm";
    case KktClause::clamp: return "clamp";
    case KktClause::level_sum: return "level_sum";
    case KktClause::zero_rows: return "zero_rows";
    case KktClause::dual_radius: return "dual_radius";
    case KktClause::shape: return "shape";
    }
    return "?";
}

struct KktReport {
    bool passed = true;
    KktClause clause = KktClause::none;
    std::string detail;
};

/// Checks that X has the structure of the projection of B onto the
/// tau-ball. Reports the first violated clause. Tolerances for the
/// per-entry and dual-radius checks scale with the magnitude of B.
inline KktReport check_kkt(const Matrix& B, double tau, const Matrix& X, double tol)
{
    auto fail = [](KktClause c, std::string msg) { return KktReport{false, c, std::move(msg)}; };
    if (B.rows() != X.rows() || B.cols() != X.cols()) return fail(KktClause::shape, "shape mismatch");

    const double norm = norm_linf1(X);
    if (std::abs(norm - tau) > tol) {
        return fail(KktClause::norm, "||X||_inf,1 = " + std::to_string(norm));
    }

    const double scale = std::max(1.0, norm_max(B));
    double level_sum = 0.0;
    std::vector<double> radii;
    std::vector<std::size_t> zero_rows;
    for (std::size_t m = 0; m < B.rows(); ++m) {
        const auto b = B.row(m);
        const auto x = X.row(m);
        const double lam = linf_norm(x);
        if (lam == 0.0) {
            zero_rows.push_back(m);
            continue;
        }
        level_sum += lam;
        double radius = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i) {
            const double want = std::clamp(b[i], -lam, lam);
            if (std::abs(x[i] - want) > tol * scale) {
                return fail(KktClause::clamp, "row " + std::to_string(m) + " entry " +
                                                  std::to_string(i) + " is not a clamp");
            }
            radius += std::abs(b[i] - x[i]);
        }
        radii.push_back(radius);
    }
    if (std::abs(level_sum - tau) > tol) {
        return fail(KktClause::level_sum, "clamp levels sum to " + std::to_string(level_sum));
    }

    // gamma is recovered from the nonzero rows; with none, every row must be
    // zero which only happens for tau = 0.
    double gamma = radii.empty() ? norm_l1inf(B) : *std::max_element(radii.begin(), radii.end());
    const double gtol = tol * std::max(1.0, gamma);
    for (std::size_t m : zero_rows) {
        if (l1_norm(B.row(m)) > gamma + gtol) {
            return fail(KktClause::zero_rows, "zero row " + std::to_string(m) +
                                                  " has l1 norm above gamma");
        }
    }
    for (double r : radii) {
        if (std::abs(r - gamma) > gtol * static_cast<double>(B.cols())) {
            return fail(KktClause::dual_radius, "dual radius spread: " + std::to_string(gamma - r));
        }
    }
    return {};
}

}  // namespace linf1::oracle
