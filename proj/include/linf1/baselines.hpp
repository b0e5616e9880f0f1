#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "linf1/linf1.hpp"

namespace linf1 {

/// GRF defaults: no pruning and no initial point, as in the original
/// root-search projector. Both can be switched on for ablations.
inline SolverOptions grf_defaults()
{
    SolverOptions o;
    o.use_initial_point = false;
    o.use_pruning = false;
    return o;
}

struct SteffensenOptions {
    /// Floor below which a secant slope counts as flat.
    double tol_c = 1e-12;
    /// Sets the perturbation: y_n = x_n + alpha_n |f(x_n)| with
    /// alpha_n = 0.75 tol_u / |f(x_n)|, inside (tol_u / 2|f|, tol_u / |f|).
    double tol_u = 1e-8;
    int max_iter = 100;
    /// Same stopping rule as the Newton projector.
    double tolerance = 1e-12;
    bool use_initial_point = true;
    bool use_pruning = true;
};

namespace detail {

/// Brent's zeroin on [a, b] with f(a), f(b) of opposite sign. On return b
/// holds the best estimate and fb its value.
template <class Eval>
void brent_loop(Eval& eval, double a, double& b, double fa, double& fb, double xtol, double ftol,
                int max_iter, ProjectionResult& res)
{
    constexpr double eps = std::numeric_limits<double>::epsilon();
    double c = b;
    double fc = fb;
    double d = b - a;
    double e = d;
    for (;;) {
        if ((fb > 0.0 && fc > 0.0) || (fb < 0.0 && fc < 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * xtol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || std::abs(fb) <= ftol) {
            res.converged = true;
            break;
        }
        if (res.iterations == max_iter) break;

        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            const double s = fb / fa;
            double p;
            double q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qa = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
            const double min2 = std::abs(e * q);
            if (2.0 * p < std::min(min1, min2)) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol1 ? d : std::copysign(tol1, xm);
        fb = eval(b);
    }
}

}  // namespace detail

/// Brent-style root search (bisection, secant and inverse quadratic
/// interpolation) on the search function over [0, max_m ||b_m||_1].
/// Stops when |f| <= tolerance * max(1, tau) or the bracket has collapsed to
/// a few ulps.
inline ProjectionResult grf_project(const Matrix& B, double tau,
                                    const SolverOptions& opts = grf_defaults())
{
    if (!(opts.tolerance > 0.0) || opts.max_iter < 1) {
        throw std::invalid_argument("grf_project: tolerance must be positive, max_iter >= 1");
    }
    require_finite(B, "grf_project");
    const auto t0 = std::chrono::steady_clock::now();
    if (auto trivial = trivial_check(B, tau)) {
        trivial->elapsed = detail::elapsed_since(t0);
        return std::move(*trivial);
    }

    SearchFunction f(B, tau, opts.use_pruning);
    const double ftol = opts.tolerance * std::max(1.0, tau);
    ProjectionResult res;
    auto eval = [&](double g) {
        const double v = f(g).f_value;
        ++res.iterations;
        res.gamma_trace.push_back(g);
        res.active_trace.push_back(f.live_rows());
        return v;
    };

    double a = opts.use_initial_point ? initial_gamma(B, f.active(), tau) : 0.0;
    double b = norm_l1inf(B);
    const double xtol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, b);
    double fa = eval(a);
    double fb = fa;
    if (std::abs(fa) <= ftol) {
        // The initial point can be the root itself, with f rounding to
        // either side of zero.
        b = a;
        res.converged = true;
    } else {
        fb = eval(b);
        if ((fa > 0.0 && fb > 0.0) || (fa < 0.0 && fb < 0.0)) {
            throw std::logic_error("grf_project: search function does not change sign on bracket");
        }
        detail::brent_loop(eval, a, b, fa, fb, xtol, ftol, opts.max_iter, res);
    }

    // The last evaluation may belong to the rotated-out endpoint.
    if (res.gamma_trace.back() != b) f(b);
    res.residual = std::abs(fb);
    res.gamma_star = b;
    res.evaluations = f.evaluations();
    res.X = assemble(B, f.last());
    res.elapsed = detail::elapsed_since(t0);
    return res;
}

/// Steffensen root search with the adaptive perturbation y_n = x_n +
/// alpha_n |f(x_n)|; each update costs two evaluations of the search
/// function (2 * iterations - 1 in total, the last iterate needs no
/// perturbation point). Starts from the same initial point and prunes the
/// same way as newton_project.
inline ProjectionResult srf_project(const Matrix& B, double tau, const SteffensenOptions& opts = {})
{
    if (!(opts.tol_c > 0.0) || !(opts.tol_u > 0.0) || !(opts.tolerance > 0.0) ||
        opts.max_iter < 1) {
        throw std::invalid_argument("srf_project: tolerances must be positive, max_iter >= 1");
    }
    require_finite(B, "srf_project");
    const auto t0 = std::chrono::steady_clock::now();
    if (auto trivial = trivial_check(B, tau)) {
        trivial->elapsed = detail::elapsed_since(t0);
        return std::move(*trivial);
    }

    SearchFunction f(B, tau, opts.use_pruning);
    const double tol_abs = opts.tolerance * std::max(1.0, tau);
    double x = 0.0;
    if (opts.use_initial_point) x = initial_gamma(B, f.active(), tau);
    detail::Bracket br{x, norm_l1inf(B)};

    ProjectionResult res;
    auto eval = [&](double g) {
        const double v = f(g).f_value;
        res.gamma_trace.push_back(g);
        res.active_trace.push_back(f.live_rows());
        return v;
    };

    for (;;) {
        const double fx = eval(x);
        ++res.iterations;
        if (std::abs(fx) <= tol_abs) {
            res.converged = true;
            break;
        }
        if (res.iterations == opts.max_iter) break;
        br.update(x, fx);

        const double alpha = 0.75 * opts.tol_u / std::abs(fx);
        const double y = x + alpha * std::abs(fx);
        const double fy = eval(y);
        br.update(y, fy);

        const double slope = (fy - fx) / (y - x);
        double next = slope < -opts.tol_c ? x - fx / slope : br.mid();
        if (!br.contains(next)) next = br.mid();
        x = next;
    }
    detail::finish_result(res, B, f, x, tol_abs, br, t0);
    return res;
}

}  // namespace linf1
