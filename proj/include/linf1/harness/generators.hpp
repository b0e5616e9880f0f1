#pragma once

#include <cstdint>
#include <stdexcept>

#include "linf1/harness/rng.hpp"
#include "linf1/matrix.hpp"

namespace linf1::harness {

/// M x N matrix with entries uniform on [-0.5, 0.5).
inline Matrix gen_uniform(std::size_t M, std::size_t N, std::uint64_t seed)
{
    if (M == 0 || N == 0) throw std::invalid_argument("gen_uniform: M and N must be >= 1");
    Xoshiro256 rng(seed);
    Matrix B(M, N);
    for (double& x : B.data()) x = rng.uniform() - 0.5;
    return B;
}

/// Rows with exponentially distributed l1 norms (mean `scale`) and directions
/// uniform on the l1 sphere: magnitudes are i.i.d. exponential normalized to
/// sum one, signs are fair coin flips.
inline Matrix gen_laplacian_rows(std::size_t M, std::size_t N, std::uint64_t seed, double scale = 1.0)
{
    if (M == 0 || N == 0) throw std::invalid_argument("gen_laplacian_rows: M and N must be >= 1");
    if (!(scale > 0.0)) throw std::invalid_argument("gen_laplacian_rows: scale must be positive");
    Xoshiro256 rng(seed);
    Matrix B(M, N);
    for (std::size_t m = 0; m < M; ++m) {
        auto row = B.row(m);
        double sum = 0.0;
        for (double& x : row) {
            x = rng.exponential(1.0);
            sum += x;
        }
        const double norm = rng.exponential(scale);
        for (double& x : row) {
            const double sign = (rng() >> 63) ? -1.0 : 1.0;
            x = sign * x / sum * norm;
        }
    }
    return B;
}

}  // namespace linf1::harness
