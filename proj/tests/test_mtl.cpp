#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "linf1/baselines.hpp"
#include "linf1/harness/mtl_data.hpp"
#include "linf1/mtl.hpp"

using namespace linf1;
using mtl::MtlProblem;
using mtl::PgdOptions;
using mtl::StepPolicy;

namespace {

Eigen::MatrixXd to_eigen(const Matrix& A)
{
    Eigen::MatrixXd E(A.rows(), A.cols());
    for (std::size_t i = 0; i < A.rows(); ++i) {
        for (std::size_t j = 0; j < A.cols(); ++j) E(i, j) = A(i, j);
    }
    return E;
}

double max_abs_diff(const Matrix& A, const Eigen::MatrixXd& E)
{
    double d = 0.0;
    for (std::size_t i = 0; i < A.rows(); ++i) {
        for (std::size_t j = 0; j < A.cols(); ++j) d = std::max(d, std::abs(A(i, j) - E(i, j)));
    }
    return d;
}

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed)
{
    harness::Xoshiro256 rng(seed);
    Matrix A(r, c);
    for (double& x : A.data()) x = rng.normal();
    return A;
}

auto newton = [](const Matrix& A, double r) { return newton_project(A, r); };

}  // namespace

TEST(Objective, HandComputed)
{
    const MtlProblem p{Matrix{{1.0, 0.0}, {0.0, 1.0}}, Matrix{{1.0}, {2.0}}, 1.0};
    EXPECT_DOUBLE_EQ(mtl::objective(p, Matrix(2, 1)), 2.5);
    EXPECT_DOUBLE_EQ(mtl::objective(p, Matrix{{1.0}, {2.0}}), 0.0);
    EXPECT_THROW(mtl::objective(p, Matrix(3, 1)), std::invalid_argument);
}

TEST(Objective, MatchesDenseAlgebra)
{
    const MtlProblem p{random_matrix(10, 5, 1), random_matrix(10, 3, 2), 1.0};
    const Matrix W = random_matrix(5, 3, 3);
    const Eigen::MatrixXd X = to_eigen(p.design);
    const Eigen::MatrixXd R = X * to_eigen(W) - to_eigen(p.targets);
    EXPECT_NEAR(mtl::objective(p, W), 0.5 * R.squaredNorm(), 1e-12 * R.squaredNorm());
    EXPECT_LE(max_abs_diff(mtl::gradient(p, W), X.transpose() * R), 1e-12 * R.norm() * X.norm());
}

TEST(Lipschitz, IdentityAndDiagonal)
{
    EXPECT_NEAR(mtl::lipschitz_estimate(Matrix{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, 100).value, 1.01, 1e-9);
    EXPECT_NEAR(mtl::lipschitz_estimate(Matrix{{3, 0}, {0, 1}}, 100).value, 9.09, 1e-9);
    const auto z = mtl::lipschitz_estimate(Matrix(4, 3), 10);
    EXPECT_TRUE(z.degenerate);
    EXPECT_EQ(z.value, 1.0);
}

TEST(Lipschitz, RandomDesignAgainstEigensolver)
{
    for (std::uint64_t s = 0; s < 10; ++s) {
        const Matrix D = random_matrix(20, 10, 40 + s);
        const Eigen::MatrixXd E = to_eigen(D);
        const Eigen::MatrixXd G = E.transpose() * E;
        const double top = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G).eigenvalues().maxCoeff();
        const double est = mtl::lipschitz_estimate(D, 100).value;
        EXPECT_GE(est, top);
        EXPECT_LE(est, 1.02 * top);
    }
}

TEST(Pgd, LargeRadiusReachesLeastSquares)
{
    const MtlProblem base{random_matrix(50, 10, 5), random_matrix(50, 3, 6), 1.0};
    const Eigen::MatrixXd X = to_eigen(base.design);
    const Eigen::MatrixXd W_ls = (X.transpose() * X).ldlt().solve(X.transpose() * to_eigen(base.targets));
    MtlProblem p = base;
    p.radius = 1e6;
    PgdOptions o;
    o.max_iter = 5000;
    o.tol = 1e-12;
    for (auto step : {StepPolicy::armijo, StepPolicy::fixed}) {
        o.step = step;
        const auto r = mtl::pgd_solve(p, newton, o);
        EXPECT_TRUE(r.converged);
        EXPECT_LE(max_abs_diff(r.coefficients, W_ls), 1e-6);
    }
}

TEST(Pgd, StationaryStartStopsAtOnce)
{
    // Targets generated exactly by W0, which sits well inside the ball.
    const Matrix design = random_matrix(30, 6, 7);
    const Matrix W0 = random_matrix(6, 2, 8);
    const MtlProblem p{design, mtl::multiply(design, W0), 10.0 * norm_linf1(W0)};
    PgdOptions o;
    o.initial = W0;
    o.tol = 1e-8;
    const auto r = mtl::pgd_solve(p, newton, o);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.iterations, 1);
    EXPECT_LE(frobenius_distance(r.coefficients, W0), 1e-10);
}

TEST(Pgd, ArmijoDecreasesObjectiveAndStaysFeasible)
{
    const auto inst = harness::gen_mtl_instance(150, 100, 3, 5, 0.01, 13);
    MtlProblem p = inst.problem;
    p.radius *= 0.5;
    const auto r = mtl::pgd_solve(p, newton);
    ASSERT_GE(r.objective_trace.size(), 2u);
    for (std::size_t k = 1; k < r.objective_trace.size(); ++k) {
        EXPECT_LE(r.objective_trace[k], r.objective_trace[k - 1]);
    }
    for (double n : r.norm_trace) EXPECT_LE(n, p.radius * (1 + 1e-12));
    EXPECT_EQ(r.projection_seconds.size() >= static_cast<std::size_t>(r.iterations), true);
}

TEST(Pgd, RecoversPlantedRowSupport)
{
    const auto inst = harness::gen_mtl_instance(150, 100, 3, 5, 0.01, 21);
    PgdOptions o;
    o.max_iter = 2000;
    const auto r = mtl::pgd_solve(inst.problem, newton, o);
    ASSERT_TRUE(r.converged);
    std::vector<std::size_t> found;
    const double top = norm_max(r.coefficients);
    for (std::size_t m = 0; m < r.coefficients.rows(); ++m) {
        if (linf_norm(r.coefficients.row(m)) > 1e-3 * top) found.push_back(m);
    }
    EXPECT_EQ(found, inst.support);
}

// Projected gradient with step 1/L is Fejer monotone: the distance to the
// solution never increases.
TEST(Pgd, FixedStepIsFejerMonotone)
{
    const auto inst = harness::gen_mtl_instance(60, 40, 3, 4, 0.05, 31);
    MtlProblem p = inst.problem;
    p.radius *= 0.7;
    PgdOptions ref;
    ref.max_iter = 20000;
    ref.tol = 1e-13;
    const Matrix W_star = mtl::pgd_solve(p, newton, ref).coefficients;

    PgdOptions o;
    o.step = StepPolicy::fixed;
    o.max_iter = 300;
    std::vector<double> dist;
    o.on_iterate = [&](int, const Matrix& W) { dist.push_back(frobenius_distance(W, W_star)); };
    mtl::pgd_solve(p, newton, o);
    ASSERT_GT(dist.size(), 5u);
    for (std::size_t k = 1; k < dist.size(); ++k) EXPECT_LE(dist[k], dist[k - 1] + 1e-9);
}

TEST(Pgd, ProjectorChoiceDoesNotMatter)
{
    const auto inst = harness::gen_mtl_instance(100, 60, 3, 5, 0.01, 41);
    MtlProblem p = inst.problem;
    p.radius *= 0.8;
    PgdOptions o;
    o.max_iter = 3000;
    o.tol = 1e-10;
    const auto a = mtl::pgd_solve(p, newton, o);
    const auto b = mtl::pgd_solve(p, [](const Matrix& A, double r) { return grf_project(A, r); }, o);
    const auto c = mtl::pgd_solve(p, [](const Matrix& A, double r) { return srf_project(A, r); }, o);
    EXPECT_LE(frobenius_distance(a.coefficients, b.coefficients), 1e-6);
    EXPECT_LE(frobenius_distance(a.coefficients, c.coefficients), 1e-6);
}

TEST(Pgd, RejectsBadInput)
{
    MtlProblem p{Matrix{{1.0}}, Matrix{{1.0}}, 0.0};
    EXPECT_THROW(mtl::pgd_solve(p, newton), std::invalid_argument);
    p.radius = 1.0;
    p.targets(0, 0) = NAN;
    EXPECT_THROW(mtl::pgd_solve(p, newton), std::invalid_argument);
}

TEST(Pgd, NonConvergingProjectorIsAnError)
{
    const auto inst = harness::gen_mtl_instance(30, 20, 2, 3, 0.01, 3);
    MtlProblem p = inst.problem;
    p.radius *= 0.3;
    auto capped = [](const Matrix& A, double r) {
        SolverOptions o;
        o.max_iter = 1;
        o.use_initial_point = false;
        return newton_project(A, r, o);
    };
    EXPECT_THROW(mtl::pgd_solve(p, capped), std::runtime_error);
}
