#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "linf1/harness/matrix_io.hpp"
#include "linf1/matrix.hpp"

#ifndef LINF1_CLI_PATH
#error "LINF1_CLI_PATH must point at the linf1 executable"
#endif

namespace fs = std::filesystem;
using namespace linf1;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
};

CliRun run(const std::string& args)
{
    const fs::path log = fs::temp_directory_path() / ("linf1_cli_" + std::to_string(::getpid()) + ".log");
    const std::string cmd = std::string("\"") + LINF1_CLI_PATH + "\" " + args + " > \"" +
                            log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() /
               ("linf1_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, ProjectWritesTheProjection)
{
    {
        std::ofstream(path("b.csv")) << "0.5,0.2\n0.1,0.1\n";
    }
    const CliRun r = run("project --input " + path("b.csv") + " --output " + path("x.csv") + " --tau 0.3");
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("converged    yes"), std::string::npos) << r.out;
    const Matrix X = harness::read_matrix(path("x.csv"));
    EXPECT_NEAR(X(0, 0), 0.3, 1e-12);
    EXPECT_NEAR(X(0, 1), 0.2, 1e-12);
    EXPECT_EQ(X(1, 0), 0.0);
}

TEST_F(CliTest, ProjectRawFormatAndBaselines)
{
    harness::write_matrix(path("b.bin"), Matrix{{0.5, 0.2}, {0.1, 0.1}}, harness::MatrixFormat::raw);
    for (const char* m : {"newton", "grf", "srf"}) {
        const CliRun r = run(std::string("project --format raw --method ") + m + " --input " +
                          path("b.bin") + " --output " + path("x.bin") + " --alpha 0.5");
        ASSERT_EQ(r.code, 0) << r.out;
        const Matrix X = harness::read_matrix(path("x.bin"), harness::MatrixFormat::raw);
        EXPECT_NEAR(norm_linf1(X), 0.3, 1e-12) << m;
    }
}

TEST_F(CliTest, InvalidInputExitsTwo)
{
    {
        std::ofstream(path("bad.csv")) << "1,2\nx,4\n";
    }
    EXPECT_EQ(run("project --input " + path("bad.csv") + " --output " + path("x.csv") + " --tau 1").code, 2);
    {
        std::ofstream(path("b.csv")) << "1,2\n";
    }
    EXPECT_EQ(run("project --input " + path("b.csv") + " --output " + path("x.csv") + " --tau -1").code, 2);
    EXPECT_EQ(run("project --input " + path("b.csv") + " --output " + path("x.csv")).code, 2);
    EXPECT_EQ(run("project --input " + path("b.csv") + " --output " + path("x.csv") +
                  " --tau 1 --alpha 0.5").code,
              2);
    EXPECT_EQ(run("bench --out " + path("r.csv") + " --sizes 10by3").code, 2);
    EXPECT_EQ(run("bench --out " + path("r.csv") + " --threads 2").code, 2);
    EXPECT_EQ(run("nosuchcommand").code, 2);
    EXPECT_EQ(run("project --input " + path("b.csv") + " --output " + path("x.csv") +
                  " --tau 1 --method bogus").code,
              2);
}

TEST_F(CliTest, MissingFileIsAnIoError)
{
    EXPECT_EQ(run("project --input " + path("missing.csv") + " --output " + path("x.csv") + " --tau 1").code, 1);
}

TEST_F(CliTest, MtlNonConvergenceExitsThree)
{
    const CliRun r = run("mtl --m 30 --n 40 --k 2 --nonzero 3 --max-iter 2 --seed 3");
    EXPECT_EQ(r.code, 3) << r.out;
    EXPECT_NE(r.out.find("converged         no"), std::string::npos) << r.out;
}

TEST_F(CliTest, MtlConverges)
{
    const CliRun r = run("--seed 7 mtl --m 30 --n 60 --k 2 --nonzero 3 --alpha 0.8");
    EXPECT_EQ(r.code, 0) << r.out;
}

TEST_F(CliTest, BenchFromConfigFileIsSeeded)
{
    {
        std::ofstream(path("bench.toml")) << "[bench]\nsizes = [\"40x10\"]\nalphas = [0.001, 0.01]\n"
                                             "trials = 2\nseed = 11\nno-timing = true\n";
    }
    const CliRun a = run("bench --config " + path("bench.toml") + " --out " + path("a.csv"));
    ASSERT_EQ(a.code, 0) << a.out;
    const CliRun b = run("bench --config " + path("bench.toml") + " --out " + path("b.csv"));
    ASSERT_EQ(b.code, 0) << b.out;

    auto slurp = [](const std::string& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string csv = slurp(path("a.csv"));
    EXPECT_EQ(csv, slurp(path("b.csv")));
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "size_m,size_n,alpha,method,trial,error,iterations,elapsed_s,sparsity_pct");
    // 2 alphas x 2 trials x 3 methods, plus the header.
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 13);

    const CliRun c = run("bench --config " + path("bench.toml") + " --out " + path("c.csv") + " --seed 12");
    ASSERT_EQ(c.code, 0) << c.out;
    EXPECT_NE(csv, slurp(path("c.csv")));
}
