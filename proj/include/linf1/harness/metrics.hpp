#pragma once

#include <cmath>
#include <stdexcept>

#include "linf1/matrix.hpp"

namespace linf1::harness {

struct Metrics {
    /// | ||X||_inf,1 - tau |
    double error = 0.0;
    /// Percentage of rows of X with a nonzero entry.
    double sparsity_percent = 0.0;
};

inline double row_sparsity_percent(const Matrix& X)
{
    if (X.rows() == 0) return 0.0;
    std::size_t nonzero = 0;
    for (std::size_t m = 0; m < X.rows(); ++m) nonzero += linf_norm(X.row(m)) > 0.0;
    return 100.0 * static_cast<double>(nonzero) / static_cast<double>(X.rows());
}

inline Metrics metrics(const Matrix& X, const Matrix& B, double tau)
{
    if (X.rows() != B.rows() || X.cols() != B.cols()) {
        throw std::invalid_argument("metrics: X and B shapes differ");
    }
    return {std::abs(norm_linf1(X) - tau), row_sparsity_percent(X)};
}

}  // namespace linf1::harness
