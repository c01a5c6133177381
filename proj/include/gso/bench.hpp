#pragma once
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <future>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include <gso/path.hpp>
#include <gso/synthetic.hpp>

namespace gso {

struct BenchRow
{
    std::string scenario;
    Index d = 0;
    Index dB = 0;
    double alpha = 0;
    std::string mode;
    std::uint64_t seed = 0;
    double total_seconds = 0;
    long total_outer_iters = 0;
    double rel_error = std::nan(""); ///< prox_bench only: distance to the reference over its norm
    std::string error;               ///< empty on success

    /// Per-tau detail of a path run (regression scenarios).
    std::vector<PathEntry> path;
};

struct BenchAggregate
{
    std::string mode;
    int runs = 0;
    int failures = 0;
    double mean_seconds = 0;
    double std_seconds = 0;
    double mean_iters = 0;
    double std_iters = 0;
};

struct BenchReport
{
    std::vector<BenchRow> rows;
    std::vector<BenchAggregate> aggregates;

    const BenchAggregate& aggregate(const std::string& mode) const
    {
        for (const auto& a : aggregates) {
            if (a.mode == mode) return a;
        }
        throw input_error("benchmark report has no mode '" + mode + "'");
    }
};

struct BenchOptions
{
    int repetitions = 1;
    std::uint64_t seed = 0; ///< repetition k uses seed + k
    int workers = 1;
    /// Regression scenarios: "projection" and/or "replication".
    std::vector<Mode> modes{Mode::projection, Mode::replication};
    SolverConfig solver;
    AutoGridOptions grid;
    /// prox_bench: relative tolerance eps; the cyclic stop uses eps * ||x||.
    double prox_rel_tol = 1e-3;
    /// prox_bench backends: any of "cp2", "dual", "cpinf".
    std::vector<std::string> prox_modes{"cp2", "dual", "cpinf"};
};

namespace detail {

inline void mean_std(const std::vector<double>& v, double& mean, double& sd)
{
    mean = sd = 0;
    if (v.empty()) return;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    if (v.size() < 2) return;
    for (double x : v) sd += (x - mean) * (x - mean);
    sd = std::sqrt(sd / static_cast<double>(v.size() - 1));
}

inline std::vector<BenchRow> bench_regression(const SyntheticSpec& spec, std::uint64_t seed,
                                              const BenchOptions& opts)
{
    RegressionData data = spec.scenario == Scenario::regression_overlap
                              ? gen_regression_overlap(spec.d, spec.dB, spec.alpha, seed, spec.n)
                              : gen_regression_no_overlap(spec.d, num_groups_for(spec.d, spec.dB, 1.0),
                                                          spec.n > 0 ? spec.n : 100, seed);
    Problem problem{std::move(data.design), std::move(data.response), 1.0, std::move(data.groups),
                    Exponent::two};
    SolverConfig cfg = opts.solver;
    if (problem.p == Exponent::two) cfg.prox.backend = Backend::dual_newton;

    std::vector<BenchRow> rows;
    std::vector<double> taus;
    std::string grid_error;
    try {
        taus = auto_tau_grid(problem, cfg, opts.grid).taus;
    } catch (const std::exception& e) {
        grid_error = e.what();
    }
    for (Mode m : opts.modes) {
        BenchRow row;
        row.scenario = to_string(spec.scenario);
        row.d = spec.d;
        row.dB = spec.dB;
        row.alpha = spec.alpha;
        row.mode = to_string(m);
        row.seed = seed;
        if (!grid_error.empty()) {
            row.error = "grid: " + grid_error;
            rows.push_back(std::move(row));
            continue;
        }
        PathOptions po;
        po.mode = m;
        try {
            auto path = regularization_path(problem, taus, cfg, po);
            row.total_seconds = path.total_seconds();
            row.total_outer_iters = path.total_outer_iterations();
            if (path.failures() > 0) row.error = std::to_string(path.failures()) + " tau values failed";
            row.path = std::move(path.entries);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<BenchRow> bench_prox(const SyntheticSpec& spec, std::uint64_t seed,
                                        const BenchOptions& opts)
{
    const auto inst = gen_prox_bench(spec, seed);
    const auto& gs = inst.groups;
    const double tol = opts.prox_rel_tol * inst.x.norm();
    using clock = std::chrono::steady_clock;

    // High-precision p = 2 reference for the error column.
    Vector ref2;
    try {
        ProxOptions ro;
        ro.backend = Backend::dual_newton;
        ro.allow_fallback = false;
        ref2 = prox(inst.x, inst.tau2, gs, Exponent::two, ro, 1e-10).projection_point;
    } catch (const std::exception&) {
        ref2.resize(0);
    }

    std::vector<BenchRow> rows;
    for (const auto& mode : opts.prox_modes) {
        BenchRow row;
        row.scenario = to_string(spec.scenario);
        row.d = spec.d;
        row.dB = spec.dB;
        row.alpha = spec.alpha;
        row.mode = mode;
        row.seed = seed;
        try {
            Exponent p = mode == "cpinf" ? Exponent::infinity : Exponent::two;
            ProxOptions po;
            if (mode == "dual") {
                po.backend = Backend::dual_newton;
            } else if (mode == "cp2" || mode == "cpinf") {
                po.backend = Backend::cyclic;
                po.cyclic.max_iter = 100000000;
            } else {
                throw input_error("unknown prox benchmark mode '" + mode + "' (expected cp2, dual or cpinf)");
            }
            const double lambda = p == Exponent::two ? inst.tau2 : inst.tau_inf;
            const auto t0 = clock::now();
            auto res = prox(inst.x, lambda, gs, p, po, tol);
            row.total_seconds = std::chrono::duration<double>(clock::now() - t0).count();
            row.total_outer_iters = res.backend_iterations;
            if (p == Exponent::two && ref2.size() > 0) {
                row.rel_error = (res.projection_point - ref2).norm() / std::max(ref2.norm(), 1e-300);
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace detail

/**
 * Runs the scenario for seeds seed, seed+1, ...; each regression repetition
 * computes an automatic tau grid and times the full path in every mode.
 * Failed runs are kept in rows and excluded from the aggregates.
 */
inline BenchReport benchmark(const SyntheticSpec& spec, const BenchOptions& opts)
{
    if (opts.repetitions < 1) throw input_error("benchmark: repetitions must be >= 1");
    if (opts.workers < 1) throw input_error("benchmark: workers must be >= 1");
    if (spec.scenario == Scenario::regression_overlap) num_groups_for(spec.d, spec.dB, spec.alpha);

    auto run_one = [&](std::uint64_t seed) {
        return spec.scenario == Scenario::prox_bench ? detail::bench_prox(spec, seed, opts)
                                                     : detail::bench_regression(spec, seed, opts);
    };

    std::vector<std::vector<BenchRow>> per_rep(opts.repetitions);
    if (opts.workers == 1) {
        for (int k = 0; k < opts.repetitions; ++k) per_rep[k] = run_one(opts.seed + k);
    } else {
        for (int start = 0; start < opts.repetitions; start += opts.workers) {
            std::vector<std::future<std::vector<BenchRow>>> jobs;
            for (int k = start; k < std::min(opts.repetitions, start + opts.workers); ++k) {
                jobs.push_back(std::async(std::launch::async, run_one, opts.seed + k));
            }
            for (std::size_t i = 0; i < jobs.size(); ++i) per_rep[start + i] = jobs[i].get();
        }
    }

    BenchReport rep;
    for (auto& rows : per_rep) {
        for (auto& r : rows) rep.rows.push_back(std::move(r));
    }
    std::vector<std::string> modes;
    for (const auto& r : rep.rows) {
        if (std::find(modes.begin(), modes.end(), r.mode) == modes.end()) modes.push_back(r.mode);
    }
    for (const auto& m : modes) {
        BenchAggregate a;
        a.mode = m;
        std::vector<double> secs, iters;
        for (const auto& r : rep.rows) {
            if (r.mode != m) continue;
            ++a.runs;
            if (!r.error.empty()) {
                ++a.failures;
                continue;
            }
            secs.push_back(r.total_seconds);
            iters.push_back(static_cast<double>(r.total_outer_iters));
        }
        detail::mean_std(secs, a.mean_seconds, a.std_seconds);
        detail::mean_std(iters, a.mean_iters, a.std_iters);
        rep.aggregates.push_back(a);
    }
    return rep;
}

/// Benchmark CSV: one row per (seed, mode); per-tau rows follow when per_tau is set.
inline void write_bench_csv(std::ostream& os, const BenchReport& rep, bool per_tau = false)
{
    const auto old = os.precision(17);
    os << "scenario,d,dB,alpha,mode,seed,total_seconds,total_outer_iters,rel_error,error\n";
    for (const auto& r : rep.rows) {
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        os << r.scenario << ',' << r.d << ',' << r.dB << ',' << r.alpha << ',' << r.mode << ','
           << r.seed << ',' << r.total_seconds << ',' << r.total_outer_iters << ',';
        if (!std::isnan(r.rel_error)) os << r.rel_error;
        os << ',' << err << '\n';
    }
    if (per_tau) {
        os << "\nmode,seed,tau_index,tau,outer_iters,seconds,support_size,selected_groups\n";
        for (const auto& r : rep.rows) {
            for (std::size_t t = 0; t < r.path.size(); ++t) {
                const auto& e = r.path[t];
                os << r.mode << ',' << r.seed << ',' << t << ',' << e.tau << ',' << e.outer_iterations
                   << ',' << e.seconds << ',' << e.support.size() << ',' << e.selected_groups.size()
                   << '\n';
            }
        }
    }
    os.precision(old);
}

} // namespace gso
