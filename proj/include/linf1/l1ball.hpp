#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "linf1/matrix.hpp"

namespace linf1 {

using Vector = std::vector<double>;

/// Shrink parameter and active-entry count of an l1-ball projection.
struct L1Threshold {
    double threshold = 0.0;
    std::size_t support = 0;
};

struct L1Projection {
    Vector projected;
    double threshold = 0.0;
    std::size_t support_size = 0;
};

/// Soft thresholding: sign(v) * max(|v| - kappa, 0).
inline Vector shrink(std::span<const double> v, double kappa)
{
    if (!(kappa >= 0.0)) {
        throw std::invalid_argument("shrink: kappa must be nonnegative");
    }
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v[i]) - kappa;
        out[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
    }
    return out;
}

/// l1 norm of shrink(v, kappa), without materializing the shrunk vector.
inline double shrink_l1(std::span<const double> v, double kappa) noexcept
{
    double s = 0.0;
    for (double x : v) {
        const double mag = std::abs(x) - kappa;
        if (mag > 0.0) s += mag;
    }
    return s;
}

namespace detail {

inline void check_l1_input(std::span<const double> u, double radius, const char* who)
{
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw std::invalid_argument(std::string(who) + ": radius must be positive");
    }
    if (!all_finite(u)) {
        throw std::invalid_argument(std::string(who) + ": non-finite entry");
    }
}

inline L1Projection finish(std::span<const double> u, L1Threshold t)
{
    if (t.threshold == 0.0) {
        return {Vector(u.begin(), u.end()), 0.0, 0};
    }
    return {shrink(u, t.threshold), t.threshold, t.support};
}

}  // namespace detail

/// Threshold by sorting magnitudes in decreasing order and scanning for the
/// last breakpoint. O(n log n); used as the reference kernel.
inline L1Threshold l1_threshold_sort(std::span<const double> u, double radius)
{
    if (l1_norm(u) <= radius) return {};

    Vector v(u.size());
    std::transform(u.begin(), u.end(), v.begin(), [](double x) { return std::abs(x); });
    std::sort(v.begin(), v.end(), std::greater<>());

    double cumsum = 0.0;
    double best_sum = 0.0;
    std::size_t last = 0;
    for (std::size_t l = 0; l < v.size(); ++l) {
        cumsum += v[l];
        if ((cumsum - radius) / static_cast<double>(l + 1) < v[l]) {
            last = l + 1;
            best_sum = cumsum;
        }
    }
    return {(best_sum - radius) / static_cast<double>(last), last};
}

/// Michelot fixed-point iteration with in-place pruning of the entries that
/// fall at or below the current threshold. `work` is scratch space (resized
/// as needed); `trace`, when given, receives every threshold iterate.
///
/// Iterates are nondecreasing and bounded by the optimal threshold, so an
/// entry dropped once never comes back. The loop ends when a pass removes
/// nothing.
inline L1Threshold l1_threshold_michelot(std::span<const double> u, double radius, Vector& work,
                                         Vector* trace = nullptr)
{
    const std::size_t n = u.size();
    work.resize(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        work[i] = std::abs(u[i]);
        sum += work[i];
    }
    if (sum <= radius) return {};

    std::size_t count = n;
    double lambda = (sum - radius) / static_cast<double>(count);
    if (trace) trace->push_back(lambda);

    for (;;) {
        std::size_t kept = 0;
        double kept_sum = 0.0;
        // Branch-free compaction: the comparison is close to a coin flip on
        // the first passes. Written as a multiply because GCC at -O3 turns
        // a conditional select back into a branch.
        for (std::size_t i = 0; i < count; ++i) {
            const double x = work[i];
            const std::size_t keep = x > lambda;
            work[kept] = x;
            kept += keep;
            kept_sum += x * static_cast<double>(keep);
        }
        if (kept == count) break;
        count = kept;
        sum = kept_sum;
        lambda = (sum - radius) / static_cast<double>(count);
        if (trace) trace->push_back(lambda);
    }
    return {lambda, count};
}

/// Euclidean projection of u onto {x : ||x||_1 <= radius}, sort-based.
inline L1Projection project_l1_sort(std::span<const double> u, double radius)
{
    detail::check_l1_input(u, radius, "project_l1_sort");
    return detail::finish(u, l1_threshold_sort(u, radius));
}

/// Euclidean projection of u onto {x : ||x||_1 <= radius}, Michelot iteration.
inline L1Projection project_l1_michelot(std::span<const double> u, double radius,
                                        Vector* trace = nullptr)
{
    detail::check_l1_input(u, radius, "project_l1_michelot");
    Vector work;
    return detail::finish(u, l1_threshold_michelot(u, radius, work, trace));
}

}  // namespace linf1
