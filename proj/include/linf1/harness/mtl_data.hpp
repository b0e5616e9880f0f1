#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "linf1/harness/rng.hpp"
#include "linf1/mtl.hpp"

namespace linf1::harness {

struct MtlInstance {
    mtl::MtlProblem problem;
    /// Coefficients that generated the targets.
    Matrix truth;
    /// Sorted indices of the nonzero rows of `truth`.
    std::vector<std::size_t> support;
};

/// Gaussian design (samples x features), `nonzero_rows` random feature rows
/// with entries of magnitude in [1, 2) and random sign, targets = design *
/// truth + noise * N(0, 1). The radius is ||truth||_inf,1.
inline MtlInstance gen_mtl_instance(std::size_t samples, std::size_t features, std::size_t tasks,
                                    std::size_t nonzero_rows, double noise, std::uint64_t seed)
{
    if (samples == 0 || features == 0 || tasks == 0) {
        throw std::invalid_argument("gen_mtl_instance: dimensions must be >= 1");
    }
    if (nonzero_rows > features) {
        throw std::invalid_argument("gen_mtl_instance: more nonzero rows than features");
    }
    Xoshiro256 rng(seed);
    MtlInstance inst;
    inst.problem.design = Matrix(samples, features);
    for (double& x : inst.problem.design.data()) x = rng.normal();

    std::vector<std::size_t> perm(features);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = 0; i < nonzero_rows; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng() % (features - i));
        std::swap(perm[i], perm[j]);
    }
    inst.support.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(nonzero_rows));
    std::sort(inst.support.begin(), inst.support.end());

    inst.truth = Matrix(features, tasks);
    for (std::size_t m : inst.support) {
        for (double& x : inst.truth.row(m)) {
            const double sign = (rng() >> 63) ? -1.0 : 1.0;
            x = sign * rng.uniform(1.0, 2.0);
        }
    }
    inst.problem.targets = mtl::multiply(inst.problem.design, inst.truth);
    for (double& y : inst.problem.targets.data()) y += noise * rng.normal();
    inst.problem.radius = norm_linf1(inst.truth);
    return inst;
}

}  // namespace linf1::harness
