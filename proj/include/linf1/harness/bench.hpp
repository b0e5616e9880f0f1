#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "linf1/baselines.hpp"
#include "linf1/harness/generators.hpp"
#include "linf1/harness/metrics.hpp"
#include "linf1/harness/rng.hpp"
#include "linf1/linf1.hpp"

namespace linf1::harness {

enum class Method { newton, grf, srf };
enum class Distribution { uniform, laplacian_rows };

inline const char* to_string(Method m)
{
    switch (m) {
    case Method::newton: return "newton";
    case Method::grf: return "grf";
    case Method::srf: return "srf";
    }
    return "?";
}

inline Method parse_method(const std::string& s)
{
    if (s == "newton") return Method::newton;
    if (s == "grf") return Method::grf;
    if (s == "srf") return Method::srf;
    throw std::invalid_argument("unknown method '" + s + "' (expected newton, grf or srf)");
}

inline const char* to_string(Distribution d)
{
    return d == Distribution::uniform ? "uniform" : "laplacian-rows";
}

inline Distribution parse_distribution(const std::string& s)
{
    if (s == "uniform") return Distribution::uniform;
    if (s == "laplacian-rows" || s == "laplacian") return Distribution::laplacian_rows;
    throw std::invalid_argument("unknown distribution '" + s +
                                "' (expected uniform or laplacian-rows)");
}

/// Pruning and initial-point toggles apply to newton and srf; grf always
/// runs without both.
struct ProjectorSettings {
    bool use_pruning = true;
    bool use_initial_point = true;
};

/// Runs one projector by name.
inline ProjectionResult run_method(Method method, const Matrix& B, double tau,
                                   ProjectorSettings s = {})
{
    switch (method) {
    case Method::newton: {
        SolverOptions o;
        o.use_pruning = s.use_pruning;
        o.use_initial_point = s.use_initial_point;
        return newton_project(B, tau, o);
    }
    case Method::grf: return grf_project(B, tau);
    case Method::srf: {
        SteffensenOptions o;
        o.use_pruning = s.use_pruning;
        o.use_initial_point = s.use_initial_point;
        return srf_project(B, tau, o);
    }
    }
    throw std::invalid_argument("run_method: bad method");
}

struct BenchConfig {
    std::vector<std::pair<std::size_t, std::size_t>> sizes{{2000, 100}};
    std::vector<double> alphas{1e-4, 5e-4, 1e-3};
    int trials = 100;
    std::uint64_t seed = 42;
    std::vector<Method> methods{Method::grf, Method::srf, Method::newton};
    Distribution distribution = Distribution::uniform;
    /// Mean row l1 norm for laplacian-rows.
    double scale = 1.0;
    ProjectorSettings projector;
    /// Trial-level worker threads. More than one requires timing = false.
    int threads = 1;
    bool timing = true;
};

struct BenchRecord {
    std::size_t size_m = 0;
    std::size_t size_n = 0;
    double alpha = 0.0;
    Method method = Method::newton;
    int trial = 0;
    double error = 0.0;
    int iterations = 0;
    double elapsed_seconds = 0.0;
    double sparsity_percent = 0.0;
    bool converged = false;
};

inline void validate(const BenchConfig& cfg)
{
    if (cfg.trials < 1) throw std::invalid_argument("bench: trials must be >= 1");
    if (cfg.sizes.empty()) throw std::invalid_argument("bench: no sizes");
    for (auto [m, n] : cfg.sizes) {
        if (m == 0 || n == 0) throw std::invalid_argument("bench: sizes must be >= 1");
    }
    if (cfg.alphas.empty()) throw std::invalid_argument("bench: no alphas");
    for (double a : cfg.alphas) {
        if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("bench: alpha must lie in (0, 1)");
    }
    if (cfg.methods.empty()) throw std::invalid_argument("bench: no methods");
    if (!(cfg.scale > 0.0)) throw std::invalid_argument("bench: scale must be positive");
    if (cfg.threads < 1) throw std::invalid_argument("bench: threads must be >= 1");
    if (cfg.threads > 1 && cfg.timing) {
        throw std::invalid_argument("bench: parallel trials cannot be combined with timing");
    }
}

/// The matrix for one (size, trial) pair; shared by every alpha and method.
inline Matrix bench_matrix(const BenchConfig& cfg, std::size_t M, std::size_t N, int trial)
{
    const std::uint64_t s = derive_seed(cfg.seed, M, N, static_cast<std::uint64_t>(trial));
    return cfg.distribution == Distribution::uniform ? gen_uniform(M, N, s)
                                                     : gen_laplacian_rows(M, N, s, cfg.scale);
}

/// For each size, trial, alpha and method: build B, set tau = alpha *
/// ||B||_inf,1 and project. Records come out in (size, alpha, trial, method)
/// order regardless of threading.
inline std::vector<BenchRecord> run_bench(const BenchConfig& cfg)
{
    validate(cfg);
    const std::size_t per_trial = cfg.alphas.size() * cfg.methods.size();
    const std::size_t trials = static_cast<std::size_t>(cfg.trials);
    std::vector<BenchRecord> out(cfg.sizes.size() * trials * per_trial);

    auto slot = [&](std::size_t si, std::size_t ai, std::size_t t, std::size_t mi) -> BenchRecord& {
        return out[((si * cfg.alphas.size() + ai) * trials + t) * cfg.methods.size() + mi];
    };

    auto run_job = [&](std::size_t job) {
        const std::size_t si = job / trials;
        const std::size_t t = job % trials;
        const auto [M, N] = cfg.sizes[si];
        const Matrix B = bench_matrix(cfg, M, N, static_cast<int>(t));
        const double norm = norm_linf1(B);
        for (std::size_t ai = 0; ai < cfg.alphas.size(); ++ai) {
            const double tau = cfg.alphas[ai] * norm;
            if (!(norm > tau)) throw std::logic_error("bench: B lies inside the ball");
            for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
                const ProjectionResult r = run_method(cfg.methods[mi], B, tau, cfg.projector);
                const Metrics met = metrics(r.X, B, tau);
                BenchRecord& rec = slot(si, ai, t, mi);
                rec = {M, N, cfg.alphas[ai], cfg.methods[mi], static_cast<int>(t), met.error,
                       r.iterations, cfg.timing ? r.elapsed : 0.0, met.sparsity_percent,
                       r.converged};
            }
        }
    };

    const std::size_t jobs = cfg.sizes.size() * trials;
    if (cfg.threads == 1) {
        for (std::size_t j = 0; j < jobs; ++j) run_job(j);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(cfg.threads));
        for (int w = 0; w < cfg.threads; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t j = static_cast<std::size_t>(w); j < jobs;
                         j += static_cast<std::size_t>(cfg.threads)) {
                        run_job(j);
                    }
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    return out;
}

inline constexpr const char* kBenchCsvHeader =
    "size_m,size_n,alpha,method,trial,error,iterations,elapsed_s,sparsity_pct";

inline void write_bench_csv(std::ostream& os, const std::vector<BenchRecord>& records)
{
    os << kBenchCsvHeader << '\n';
    char buf[256];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%s,%d,%.17g,%d,%.9f,%.17g\n", r.size_m,
                      r.size_n, r.alpha, to_string(r.method), r.trial, r.error, r.iterations,
                      r.elapsed_seconds, r.sparsity_percent);
        os << buf;
    }
}

struct BenchSummary {
    std::size_t size_m = 0;
    std::size_t size_n = 0;
    double alpha = 0.0;
    Method method = Method::newton;
    int trials = 0;
    int failures = 0;
    double mean_error = 0.0;
    double max_error = 0.0;
    double mean_iterations = 0.0;
    double mean_seconds = 0.0;
    double median_seconds = 0.0;
    double mean_sparsity = 0.0;
    /// Mean GRF time over mean time of this method, same run; NaN without GRF.
    double speedup_vs_grf = std::numeric_limits<double>::quiet_NaN();
};

inline double median(std::vector<double> v)
{
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

/// Per (size, alpha, method) aggregates, in first-appearance order.
inline std::vector<BenchSummary> summarize(const std::vector<BenchRecord>& records)
{
    using Key = std::tuple<std::size_t, std::size_t, double, int>;
    std::vector<Key> order;
    std::map<Key, std::vector<const BenchRecord*>> groups;
    for (const auto& r : records) {
        Key k{r.size_m, r.size_n, r.alpha, static_cast<int>(r.method)};
        auto [it, fresh] = groups.try_emplace(k);
        if (fresh) order.push_back(k);
        it->second.push_back(&r);
    }
    std::vector<BenchSummary> out;
    for (const auto& k : order) {
        const auto& g = groups[k];
        BenchSummary s;
        s.size_m = std::get<0>(k);
        s.size_n = std::get<1>(k);
        s.alpha = std::get<2>(k);
        s.method = static_cast<Method>(std::get<3>(k));
        s.trials = static_cast<int>(g.size());
        std::vector<double> times;
        for (const BenchRecord* r : g) {
            s.failures += !r->converged;
            s.mean_error += r->error;
            s.max_error = std::max(s.max_error, r->error);
            s.mean_iterations += r->iterations;
            s.mean_seconds += r->elapsed_seconds;
            s.mean_sparsity += r->sparsity_percent;
            times.push_back(r->elapsed_seconds);
        }
        const double n = static_cast<double>(g.size());
        s.mean_error /= n;
        s.mean_iterations /= n;
        s.mean_seconds /= n;
        s.mean_sparsity /= n;
        s.median_seconds = median(std::move(times));
        out.push_back(s);
    }
    for (auto& s : out) {
        for (const auto& g : out) {
            if (g.method == Method::grf && g.size_m == s.size_m && g.size_n == s.size_n &&
                g.alpha == s.alpha && s.mean_seconds > 0.0) {
                s.speedup_vs_grf = g.mean_seconds / s.mean_seconds;
            }
        }
    }
    return out;
}

}  // namespace linf1::harness
