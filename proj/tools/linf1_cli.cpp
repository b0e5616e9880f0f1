// Command-line front end: project a matrix file, run the benchmark suite, or
// solve a synthetic multi-task LASSO problem.
//
// Exit codes: 0 success, 2 invalid arguments or input, 3 convergence failure,
// 1 anything else (IO).

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "linf1/baselines.hpp"
#include "linf1/harness/bench.hpp"
#include "linf1/harness/matrix_io.hpp"
#include "linf1/harness/metrics.hpp"
#include "linf1/harness/mtl_data.hpp"
#include "linf1/linf1.hpp"
#include "linf1/mtl.hpp"
#include "linf1/oracle.hpp"

namespace {

using namespace linf1;
using namespace linf1::harness;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitNoConvergence = 3;

struct ProjectArgs {
    std::string input;
    std::string output;
    std::optional<double> tau;
    std::optional<double> alpha;
    std::string method = "newton";
    std::string format;
    bool no_pruning = false;
    bool no_initial_point = false;
    bool oracle = false;
};

struct BenchArgs {
    std::vector<std::string> sizes{"2000x100"};
    std::vector<double> alphas{1e-4, 5e-4, 1e-3};
    int trials = 100;
    std::vector<std::string> methods{"grf", "srf", "newton"};
    std::string distribution = "uniform";
    double scale = 1.0;
    bool no_pruning = false;
    bool no_initial_point = false;
    int threads = 1;
    bool no_timing = false;
    std::string out;
};

struct MtlArgs {
    std::size_t features = 100;
    std::size_t samples = 150;
    std::size_t tasks = 3;
    std::size_t nonzero = 5;
    double alpha = 1.0;
    double noise = 0.01;
    std::string method = "newton";
    std::string step = "armijo";
    int max_iter = 500;
    double tol = 1e-8;
};

std::pair<std::size_t, std::size_t> parse_size(const std::string& s)
{
    const auto x = s.find_first_of("xX");
    try {
        if (x == std::string::npos) throw std::invalid_argument("");
        std::size_t used = 0;
        const auto m = std::stoull(s.substr(0, x), &used);
        if (used != x) throw std::invalid_argument("");
        const auto n = std::stoull(s.substr(x + 1), &used);
        if (used != s.size() - x - 1) throw std::invalid_argument("");
        return {m, n};
    } catch (const std::exception&) {
        throw std::invalid_argument("bad size '" + s + "', expected MxN");
    }
}

int run_project(const ProjectArgs& a)
{
    const MatrixFormat in_fmt = a.format.empty() ? format_from_path(a.input)
                                : a.format == "csv" ? MatrixFormat::csv
                                                    : MatrixFormat::raw;
    const Matrix B = read_matrix(a.input, in_fmt);
    require_finite(B, "input");
    const double norm = norm_linf1(B);
    const double tau = a.tau ? *a.tau : *a.alpha * norm;
    if (!(tau >= 0.0)) throw std::invalid_argument("tau must be nonnegative");

    const Method method = parse_method(a.method);
    const ProjectionResult r =
        run_method(method, B, tau, {!a.no_pruning, !a.no_initial_point});
    const Metrics met = norm > tau ? metrics(r.X, B, tau) : Metrics{0.0, row_sparsity_percent(r.X)};

    std::printf("method       %s\n", to_string(method));
    std::printf("shape        %zux%zu\n", B.rows(), B.cols());
    std::printf("tau          %.17g\n", tau);
    std::printf("gamma_star   %.17g\n", r.gamma_star);
    std::printf("iterations   %d\n", r.iterations);
    std::printf("evaluations  %d\n", r.evaluations);
    std::printf("residual     %.3e\n", r.residual);
    std::printf("error        %.3e\n", met.error);
    std::printf("sparsity_pct %.4f\n", met.sparsity_percent);
    std::printf("elapsed_s    %.6f\n", r.elapsed);
    std::printf("converged    %s\n", r.converged ? "yes" : "no");

    if (a.oracle && norm > tau && tau > 0.0) {
        const auto ref = oracle::bisect_project(B, tau);
        const auto kkt = oracle::check_kkt(B, tau, r.X, 1e-9 * std::max(1.0, tau));
        std::printf("oracle_gamma %.17g\n", ref.gamma_star);
        std::printf("oracle_dist  %.3e\n", frobenius_distance(r.X, ref.X));
        std::printf("kkt          %s%s%s\n", kkt.passed ? "pass" : "fail ",
                    kkt.passed ? "" : oracle::to_string(kkt.clause),
                    kkt.passed ? "" : (" (" + kkt.detail + ")").c_str());
    }

    write_matrix(a.output, r.X, a.format.empty() ? format_from_path(a.output) : in_fmt);
    return r.converged ? kExitOk : kExitNoConvergence;
}

int run_bench_cmd(const BenchArgs& a, std::uint64_t seed)
{
    BenchConfig cfg;
    cfg.sizes.clear();
    for (const auto& s : a.sizes) cfg.sizes.push_back(parse_size(s));
    cfg.alphas = a.alphas;
    cfg.trials = a.trials;
    cfg.seed = seed;
    cfg.methods.clear();
    for (const auto& m : a.methods) cfg.methods.push_back(parse_method(m));
    cfg.distribution = parse_distribution(a.distribution);
    cfg.scale = a.scale;
    cfg.projector = {!a.no_pruning, !a.no_initial_point};
    cfg.threads = a.threads;
    cfg.timing = !a.no_timing;
    validate(cfg);

    const auto records = run_bench(cfg);
    {
        std::ofstream out(a.out, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + a.out + " for writing");
        write_bench_csv(out, records);
        if (!out) throw std::runtime_error("write failed: " + a.out);
    }

    std::printf("%-11s %-8s %-7s %10s %10s %8s %11s %11s %9s %8s\n", "size", "alpha", "method",
                "mean_err", "max_err", "iters", "mean_s", "median_s", "sparsity", "speedup");
    int failures = 0;
    for (const auto& s : summarize(records)) {
        failures += s.failures;
        char size[32];
        std::snprintf(size, sizeof size, "%zux%zu", s.size_m, s.size_n);
        std::printf("%-11s %-8g %-7s %10.2e %10.2e %8.2f %11.6f %11.6f %9.2f %8.2f\n", size,
                    s.alpha, to_string(s.method), s.mean_error, s.max_error, s.mean_iterations,
                    s.mean_seconds, s.median_seconds, s.mean_sparsity, s.speedup_vs_grf);
    }
    if (cfg.timing) std::printf("(timings and speedups are machine-relative)\n");
    std::printf("%zu records written to %s\n", records.size(), a.out.c_str());
    return failures ? kExitNoConvergence : kExitOk;
}

int run_mtl_cmd(const MtlArgs& a, std::uint64_t seed)
{
    if (!(a.alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    MtlInstance inst = gen_mtl_instance(a.samples, a.features, a.tasks, a.nonzero, a.noise, seed);
    inst.problem.radius *= a.alpha;
    const Method method = parse_method(a.method);

    mtl::PgdOptions opts;
    opts.max_iter = a.max_iter;
    opts.tol = a.tol;
    if (a.step == "fixed") {
        opts.step = mtl::StepPolicy::fixed;
    } else if (a.step != "armijo") {
        throw std::invalid_argument("unknown step policy '" + a.step + "'");
    }
    const auto res = mtl::pgd_solve(
        inst.problem, [&](const Matrix& A, double tau) { return run_method(method, A, tau); },
        opts);

    std::size_t recovered = 0;
    std::size_t selected = 0;
    for (std::size_t m = 0; m < res.coefficients.rows(); ++m) {
        if (linf_norm(res.coefficients.row(m)) == 0.0) continue;
        ++selected;
        recovered += std::binary_search(inst.support.begin(), inst.support.end(), m);
    }
    double proj_time = 0.0;
    for (double t : res.projection_seconds) proj_time += t;

    std::printf("method            %s\n", to_string(method));
    std::printf("radius            %.17g\n", inst.problem.radius);
    std::printf("iterations        %d\n", res.iterations);
    std::printf("objective         %.10e\n", res.objective_trace.back());
    std::printf("selected_rows     %zu\n", selected);
    std::printf("true_rows_found   %zu/%zu\n", recovered, inst.support.size());
    std::printf("projections       %zu\n", res.projection_seconds.size());
    std::printf("projection_s      %.6f\n", proj_time);
    std::printf("converged         %s\n", res.converged ? "yes" : "no");
    return res.converged ? kExitOk : kExitNoConvergence;
}

/// CLI11 reads config files at the top level only; move `--config FILE`
/// ahead of the subcommand so `bench --config FILE` works.
std::vector<std::string> hoist_config(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    std::vector<std::string> front;
    for (std::size_t i = 0; i < args.size();) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            front.insert(front.end(), {args[i], args[i + 1]});
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i + 2));
        } else if (args[i].rfind("--config=", 0) == 0) {
            front.push_back(args[i]);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            ++i;
        }
    }
    front.insert(front.end(), args.begin(), args.end());
    std::reverse(front.begin(), front.end());  // CLI11 takes argv in reverse order
    return front;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Projection onto the l_inf,1 ball: projector, benchmark and multi-task LASSO"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML config file; bench options go in a [bench] section");

    std::uint64_t seed = 42;
    app.add_option("--seed", seed, "PRNG seed")->capture_default_str();

    ProjectArgs pa;
    auto* project = app.add_subcommand("project", "Project a matrix onto the l_inf,1 ball");
    project->add_option("--seed", seed, "PRNG seed (unused by project)");
    project->add_option("--input", pa.input, "Input matrix (.csv or raw L1IN)")->required();
    project->add_option("--output", pa.output, "Output matrix path")->required();
    auto* tau_opt = project->add_option("--tau", pa.tau, "Ball radius");
    auto* alpha_opt = project->add_option("--alpha", pa.alpha, "Radius as a fraction of ||B||_inf,1");
    tau_opt->excludes(alpha_opt);
    project->add_option("--method", pa.method, "newton | grf | srf")->capture_default_str();
    project->add_option("--format", pa.format, "Force csv or raw for input and output")
        ->check(CLI::IsMember({"csv", "raw"}));
    project->add_flag("--no-pruning", pa.no_pruning, "Disable row pruning");
    project->add_flag("--no-initial-point", pa.no_initial_point, "Start the search at zero");
    project->add_flag("--oracle", pa.oracle, "Cross-check against the bisection oracle")
        ->group("");

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "Run the synthetic benchmark suite");
    bench->add_option("--seed", seed, "PRNG seed");
    bench->add_option("--out", ba.out, "CSV output path")->required();
    bench->add_option("--sizes", ba.sizes, "Matrix sizes as MxN")->delimiter(',')->capture_default_str();
    bench->add_option("--alphas", ba.alphas, "tau / ||B||_inf,1 values")->delimiter(',')->capture_default_str();
    bench->add_option("--trials", ba.trials, "Realizations per size")->capture_default_str();
    bench->add_option("--methods", ba.methods, "Subset of newton,grf,srf")->delimiter(',')->capture_default_str();
    bench->add_option("--distribution", ba.distribution, "uniform | laplacian-rows")->capture_default_str();
    bench->add_option("--scale", ba.scale, "Mean row l1 norm for laplacian-rows")->capture_default_str();
    bench->add_flag("--no-pruning", ba.no_pruning, "Disable row pruning (newton, srf)");
    bench->add_flag("--no-initial-point", ba.no_initial_point, "Start at zero (newton, srf)");
    bench->add_option("--threads", ba.threads, "Trial-level threads; requires --no-timing")->capture_default_str();
    bench->add_flag("--no-timing", ba.no_timing, "Record zero elapsed times");

    MtlArgs ma;
    auto* mtl_cmd = app.add_subcommand("mtl", "Solve a synthetic multi-task LASSO by PGD");
    mtl_cmd->add_option("--seed", seed, "PRNG seed");
    mtl_cmd->add_option("--m", ma.features, "Features (rows of the coefficient matrix)")->capture_default_str();
    mtl_cmd->add_option("--n", ma.samples, "Samples")->capture_default_str();
    mtl_cmd->add_option("--k", ma.tasks, "Tasks")->capture_default_str();
    mtl_cmd->add_option("--nonzero", ma.nonzero, "True nonzero feature rows")->capture_default_str();
    mtl_cmd->add_option("--alpha", ma.alpha, "Radius as a fraction of ||W_true||_inf,1")->capture_default_str();
    mtl_cmd->add_option("--noise", ma.noise, "Target noise standard deviation")->capture_default_str();
    mtl_cmd->add_option("--method", ma.method, "Projector: newton | grf | srf")->capture_default_str();
    mtl_cmd->add_option("--step", ma.step, "armijo | fixed")->capture_default_str();
    mtl_cmd->add_option("--max-iter", ma.max_iter, "PGD iteration cap")->capture_default_str();
    mtl_cmd->add_option("--tol", ma.tol, "Stop when ||W_k - W_k-1||_F < tol")->capture_default_str();

    try {
        app.parse(hoist_config(argc, argv));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        if (*project) {
            if (!pa.tau && !pa.alpha) throw std::invalid_argument("one of --tau or --alpha is required");
            return run_project(pa);
        }
        if (*bench) return run_bench_cmd(ba, seed);
        if (*mtl_cmd) return run_mtl_cmd(ma, seed);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInvalid;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    }
    return kExitOk;
}
