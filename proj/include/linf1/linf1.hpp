#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "linf1/l1ball.hpp"
#include "linf1/matrix.hpp"

namespace linf1 {

/// Options shared by the root-search projectors.
struct SolverOptions {
    /// Stop once |f(gamma)| <= tolerance * max(1, tau).
    double tolerance = 1e-12;
    int max_iter = 100;
    bool use_initial_point = true;
    bool use_pruning = true;
};

struct ProjectionResult {
    Matrix X;
    double gamma_star = 0.0;
    /// Iterates at which the search function was evaluated, counting the
    /// final one that meets the stopping rule. Auxiliary points (the
    /// Steffensen perturbation) are not iterates.
    int iterations = 0;
    /// All evaluations of the search function.
    int evaluations = 0;
    double residual = 0.0;
    double elapsed = 0.0;
    bool converged = false;
    /// Every gamma at which the search function was evaluated, in order.
    std::vector<double> gamma_trace;
    /// Rows still active after each evaluation.
    std::vector<std::size_t> active_trace;
};

/// Rows of B that can still be nonzero in the projection, with cached row
/// norms. Pruning swaps dropped rows past the end of the live prefix, so a
/// previous size can be restored with `rewind`.
class ActiveSet {
public:
    explicit ActiveSet(const Matrix& B) : order_(B.rows()), l1_(B.rows()), linf_(B.rows())
    {
        for (std::size_t m = 0; m < B.rows(); ++m) {
            order_[m] = m;
            const auto r = B.row(m);
            double s = 0.0;
            double mx = 0.0;
            for (double x : r) {
                const double a = std::abs(x);
                s += a;
                mx = std::max(mx, a);
            }
            l1_[m] = s;
            linf_[m] = mx;
        }
        count_ = order_.size();
    }

    std::span<const std::size_t> indices() const noexcept { return {order_.data(), count_}; }
    std::size_t size() const noexcept { return count_; }
    bool empty() const noexcept { return count_ == 0; }
    std::size_t total_rows() const noexcept { return order_.size(); }

    double row_l1(std::size_t m) const noexcept { return l1_[m]; }
    double row_linf(std::size_t m) const noexcept { return linf_[m]; }
    std::span<const double> row_l1() const noexcept { return l1_; }
    std::span<const double> row_linf() const noexcept { return linf_; }

    /// Drops every live row with ||b_m||_1 <= gamma.
    void prune(double gamma) noexcept
    {
        std::size_t i = 0;
        while (i < count_) {
            if (l1_[order_[i]] <= gamma) {
                std::swap(order_[i], order_[--count_]);
            } else {
                ++i;
            }
        }
    }

    /// Re-admits rows pruned since the set had `count` members.
    void rewind(std::size_t count)
    {
        if (count < count_ || count > order_.size()) {
            throw std::logic_error("ActiveSet::rewind: count outside pruned range");
        }
        count_ = count;
    }

private:
    std::vector<std::size_t> order_;
    std::vector<double> l1_;
    std::vector<double> linf_;
    std::size_t count_ = 0;
};

/// Value of the search function at one gamma, with the per-row data needed to
/// take a Newton step or assemble the projection.
struct SearchEval {
    double f_value = 0.0;
    /// Sum of 1 / n_m over contributing rows; the negated slope estimate.
    double sum_inv_support = 0.0;
    std::vector<std::size_t> rows;
    std::vector<double> thresholds;
    std::vector<std::size_t> supports;
};

namespace detail {

/// Shrink threshold that projects `row` onto the l1 ball of radius gamma.
/// At gamma = 0 the threshold is ||row||_inf and the support is the
/// multiplicity of the maximum, which gives the right-hand slope there.
inline L1Threshold row_threshold(std::span<const double> row, double row_linf, double gamma,
                                 Vector& work)
{
    if (gamma > 0.0) return l1_threshold_michelot(row, gamma, work);
    std::size_t ties = 0;
    for (double x : row) ties += (std::abs(x) == row_linf);
    return {row_linf, ties};
}

inline void clear(SearchEval& ev)
{
    ev.f_value = 0.0;
    ev.sum_inv_support = 0.0;
    ev.rows.clear();
    ev.thresholds.clear();
    ev.supports.clear();
}

inline void add_row(SearchEval& ev, std::size_t m, L1Threshold t)
{
    ev.rows.push_back(m);
    ev.thresholds.push_back(t.threshold);
    ev.supports.push_back(t.support);
    ev.f_value += t.threshold;
    ev.sum_inv_support += 1.0 / static_cast<double>(t.support);
}

/// Pruned evaluation: drops rows with ||b_m||_1 <= gamma from `active`, then
/// runs the l1 kernel on the survivors.
inline void eval_pruned(const Matrix& B, ActiveSet& active, double gamma, double tau,
                        SearchEval& ev, Vector& work)
{
    clear(ev);
    active.prune(gamma);
    for (std::size_t m : active.indices()) {
        add_row(ev, m, row_threshold(B.row(m), active.row_linf(m), gamma, work));
    }
    ev.f_value -= tau;
}

/// Unpruned evaluation: every row is visited and its norms recomputed.
inline void eval_full(const Matrix& B, double gamma, double tau, SearchEval& ev, Vector& work)
{
    clear(ev);
    for (std::size_t m = 0; m < B.rows(); ++m) {
        const auto row = B.row(m);
        if (l1_norm(row) <= gamma) continue;
        add_row(ev, m, row_threshold(row, linf_norm(row), gamma, work));
    }
    ev.f_value -= tau;
}

inline double elapsed_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// Search function f(gamma) = sum_m lambda_m(gamma) - tau, with lambda_m the
/// l1-ball threshold of row m at radius gamma. Decreasing, convex and
/// piecewise linear on [0, max_m ||b_m||_1].
///
/// Keeps pruning sound across trial points that overshoot the root: rows
/// dropped at a gamma with f < 0 are re-admitted before the next call.
/// Evaluation points must not decrease below the last point with f >= 0.
class SearchFunction {
public:
    SearchFunction(const Matrix& B, double tau, bool use_pruning)
        : B_(B), tau_(tau), pruning_(use_pruning), active_(B), committed_(active_.size())
    {
    }

    const SearchEval& operator()(double gamma)
    {
        if (gamma < committed_gamma_) {
            throw std::logic_error("SearchFunction: gamma below committed lower bound");
        }
        ++evaluations_;
        if (pruning_) {
            active_.rewind(committed_);
            detail::eval_pruned(B_, active_, gamma, tau_, eval_, work_);
            if (eval_.f_value >= 0.0) {
                committed_ = active_.size();
                committed_gamma_ = gamma;
            }
        } else {
            detail::eval_full(B_, gamma, tau_, eval_, work_);
        }
        return eval_;
    }

    const SearchEval& last() const noexcept { return eval_; }
    const ActiveSet& active() const noexcept { return active_; }
    int evaluations() const noexcept { return evaluations_; }
    std::size_t live_rows() const noexcept { return pruning_ ? active_.size() : eval_.rows.size(); }
    double tau() const noexcept { return tau_; }

private:
    const Matrix& B_;
    double tau_;
    bool pruning_;
    ActiveSet active_;
    std::size_t committed_;
    double committed_gamma_ = 0.0;
    SearchEval eval_;
    Vector work_;
    int evaluations_ = 0;
};

/// Evaluates f(gamma) on the rows of `active`, pruning those with
/// ||b_m||_1 <= gamma. With an empty survivor set f = -tau.
inline SearchEval eval_search(const Matrix& B, ActiveSet& active, double gamma, double tau)
{
    SearchEval ev;
    Vector work;
    detail::eval_pruned(B, active, gamma, tau, ev, work);
    return ev;
}

/// Handles the inputs that need no root search: X = B inside the ball, X = 0
/// for tau = 0.
inline std::optional<ProjectionResult> trivial_check(const Matrix& B, double tau)
{
    if (!(tau >= 0.0) || !std::isfinite(tau)) {
        throw std::invalid_argument("trivial_check: tau must be finite and nonnegative");
    }
    if (norm_linf1(B) <= tau) {
        ProjectionResult r;
        r.X = B;
        r.converged = true;
        return r;
    }
    if (tau == 0.0) {
        ProjectionResult r;
        r.X = Matrix(B.rows(), B.cols());
        r.gamma_star = norm_l1inf(B);
        r.converged = true;
        return r;
    }
    return std::nullopt;
}

/// Largest l1 norm of shrink(b_k, tau) over rows with ||b_k||_inf > tau, or 0
/// when no entry exceeds tau. Lies in [0, gamma*].
inline double initial_gamma(const Matrix& B, double tau)
{
    double g = 0.0;
    for (std::size_t m = 0; m < B.rows(); ++m) {
        const auto row = B.row(m);
        if (linf_norm(row) > tau) g = std::max(g, shrink_l1(row, tau));
    }
    return g;
}

/// Same as above, reusing cached row maxima.
inline double initial_gamma(const Matrix& B, const ActiveSet& active, double tau)
{
    double g = 0.0;
    for (std::size_t m = 0; m < B.rows(); ++m) {
        if (active.row_linf(m) > tau) g = std::max(g, shrink_l1(B.row(m), tau));
    }
    return g;
}

/// gamma + f / sum(1/n_m). Throws when the active set is empty; callers fall
/// back to bisection in that case.
inline double newton_step(double gamma, const SearchEval& ev)
{
    if (!(ev.sum_inv_support > 0.0)) {
        throw std::domain_error("newton_step: empty active set");
    }
    return gamma + ev.f_value / ev.sum_inv_support;
}

/// Projection from the converged thresholds: listed rows are clamped to
/// +-lambda_m, all others are zero.
inline Matrix assemble(const Matrix& B, std::span<const std::size_t> rows,
                       std::span<const double> thresholds)
{
    Matrix X(B.rows(), B.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const std::size_t m = rows[k];
        const double lam = thresholds[k];
        const auto in = B.row(m);
        auto out = X.row(m);
        for (std::size_t i = 0; i < in.size(); ++i) {
            out[i] = std::clamp(in[i], -lam, lam);
        }
    }
    return X;
}

inline Matrix assemble(const Matrix& B, const SearchEval& ev)
{
    return assemble(B, ev.rows, ev.thresholds);
}

namespace detail {

/// Bracket [lo, hi] around the root of a decreasing search function.
struct Bracket {
    double lo;
    double hi;

    void update(double gamma, double f) noexcept
    {
        if (f >= 0.0) {
            lo = std::max(lo, gamma);
        } else {
            hi = std::min(hi, gamma);
        }
    }
    bool contains(double g) const noexcept { return g > lo && g < hi; }
    double mid() const noexcept { return 0.5 * (lo + hi); }
};

inline void finish_result(ProjectionResult& res, const Matrix& B, SearchFunction& f, double gamma,
                          double tol_abs, Bracket br, std::chrono::steady_clock::time_point t0)
{
    if (!res.converged) {
        // Re-evaluate at the bracket end holding the smaller residual.
        const double g = std::abs(f.last().f_value) <= tol_abs ? gamma : br.lo;
        f(g);
        gamma = g;
    }
    res.residual = std::abs(f.last().f_value);
    res.gamma_star = gamma;
    res.evaluations = f.evaluations();
    res.X = assemble(B, f.last());
    res.elapsed = elapsed_since(t0);
}

}  // namespace detail

/// Projection of B onto {X : sum_m ||x_m||_inf <= tau} by a Newton search on
/// the dual radius gamma, X = B - prox_{tau ||.||_{1,inf}}(B).
///
/// Starting below the root, each step lands at or below the root because f
/// is convex and decreasing, so the gamma sequence increases monotonically
/// and rows pruned along the way stay pruned. A bisection fallback covers
/// the rounding cases where a step leaves the bracket.
inline ProjectionResult newton_project(const Matrix& B, double tau, const SolverOptions& opts = {})
{
    if (!(opts.tolerance > 0.0) || opts.max_iter < 1) {
        throw std::invalid_argument("newton_project: tolerance must be positive, max_iter >= 1");
    }
    require_finite(B, "newton_project");
    const auto t0 = std::chrono::steady_clock::now();
    if (auto trivial = trivial_check(B, tau)) {
        trivial->elapsed = detail::elapsed_since(t0);
        return std::move(*trivial);
    }

    SearchFunction f(B, tau, opts.use_pruning);
    const double tol_abs = opts.tolerance * std::max(1.0, tau);
    double gamma = 0.0;
    if (opts.use_initial_point) {
        gamma = opts.use_pruning ? initial_gamma(B, f.active(), tau) : initial_gamma(B, tau);
    }
    detail::Bracket br{gamma, norm_l1inf(B)};

    ProjectionResult res;
    for (;;) {
        const SearchEval& ev = f(gamma);
        ++res.iterations;
        res.gamma_trace.push_back(gamma);
        res.active_trace.push_back(f.live_rows());
        if (std::abs(ev.f_value) <= tol_abs) {
            res.converged = true;
            break;
        }
        if (res.iterations == opts.max_iter) break;
        br.update(gamma, ev.f_value);
        double next = ev.sum_inv_support > 0.0 ? newton_step(gamma, ev) : br.mid();
        if (!br.contains(next)) next = br.mid();
        gamma = next;
    }
    detail::finish_result(res, B, f, gamma, tol_abs, br, t0);
    return res;
}

}  // namespace linf1
