#pragma once

// Test-only helpers: random instance generators and reference computations
// that do not go through the library's kernels.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "linf1/harness/generators.hpp"
#include "linf1/harness/rng.hpp"
#include "linf1/matrix.hpp"

namespace linf1::test {

/// Vector with entries uniform on [-scale, scale], occasionally with exact
/// zeros and repeated magnitudes to exercise ties.
inline std::vector<double> random_vector(harness::Xoshiro256& rng, std::size_t n, double scale = 1.0)
{
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(-scale, scale);
    if (n > 2 && rng() % 4 == 0) v[rng() % n] = 0.0;
    if (n > 2 && rng() % 4 == 0) v[rng() % n] = -v[rng() % n];
    return v;
}

/// Mixed uniform / laplacian-rows matrix with random shape up to the bounds.
inline Matrix random_instance(std::uint64_t seed, std::size_t max_m, std::size_t max_n)
{
    harness::Xoshiro256 rng(seed);
    const std::size_t M = 1 + static_cast<std::size_t>(rng() % max_m);
    const std::size_t N = 1 + static_cast<std::size_t>(rng() % max_n);
    if (rng() % 2) return harness::gen_uniform(M, N, rng());
    return harness::gen_laplacian_rows(M, N, rng(), rng.uniform(0.1, 10.0));
}

/// Log-uniform alpha in [lo, hi].
inline double random_alpha(std::uint64_t seed, double lo = 1e-4, double hi = 1e-1)
{
    harness::Xoshiro256 rng(seed ^ 0x5bd1e995u);
    return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

/// l1-ball threshold by bisection on sum(max(|u| - lambda, 0)) = radius.
/// Slow and independent of both the sort and Michelot kernels.
inline double l1_threshold_bisect(const std::vector<double>& u, double radius)
{
    auto g = [&](double lam) {
        double s = 0.0;
        for (double x : u) s += std::max(std::abs(x) - lam, 0.0);
        return s - radius;
    };
    if (g(0.0) <= 0.0) return 0.0;
    double lo = 0.0;
    double hi = 0.0;
    for (double x : u) hi = std::max(hi, std::abs(x));
    for (int i = 0; i < 200 && hi - lo > 1e-16 * std::max(1.0, hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Search function f(gamma) evaluated directly from its definition, each row
/// threshold found by bisection.
inline double search_function_direct(const Matrix& B, double tau, double gamma)
{
    double s = -tau;
    for (std::size_t m = 0; m < B.rows(); ++m) {
        const auto r = B.row(m);
        std::vector<double> row(r.begin(), r.end());
        double l1 = 0.0;
        for (double x : row) l1 += std::abs(x);
        if (l1 <= gamma) continue;
        s += l1_threshold_bisect(row, gamma);
    }
    return s;
}

}  // namespace linf1::test
