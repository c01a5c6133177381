#pragma once
#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include <gso/solver.hpp>

namespace gso {

enum class Mode { projection, replication };

inline std::string to_string(Mode m) { return m == Mode::projection ? "projection" : "replication"; }

inline Mode parse_mode(const std::string& s)
{
    if (s == "projection" || s == "proj") return Mode::projection;
    if (s == "replication" || s == "repl") return Mode::replication;
    throw input_error("unknown mode '" + s + "' (expected projection or replication)");
}

/// max_r ||Psi^T y / n||_{G_r,q}: the smallest tau at which zero is optimal.
inline double tau_max(const Problem& problem)
{
    if (problem.response.size() != problem.design.rows()) throw input_error("tau_max: dimension mismatch");
    const Vector c = problem.design.transpose() * problem.response /
                     static_cast<double>(problem.samples());
    const double q = conjugate_exponent(problem.p);
    double m = 0;
    for (Index r = 0; r < problem.groups.num_groups(); ++r) {
        m = std::max(m, detail::group_norm_unchecked(c, problem.groups.group(r), q));
    }
    return m;
}

/// count values from hi down to lo in geometric progression; endpoints exact.
inline std::vector<double> tau_grid(double lo, double hi, int count)
{
    if (!(lo > 0) || !(hi > lo) || !std::isfinite(hi)) {
        throw input_error("tau_grid: need 0 < tau_min < tau_max");
    }
    if (count < 2) throw input_error("tau_grid: need at least 2 values");
    std::vector<double> taus(count);
    const double ratio = std::log(lo / hi) / static_cast<double>(count - 1);
    for (int t = 0; t < count; ++t) taus[t] = hi * std::exp(ratio * t);
    taus.front() = hi;
    taus.back() = lo;
    return taus;
}

struct PathOptions
{
    Mode mode = Mode::projection;
    bool warm_start = true;
    /// Carry dual-Newton multipliers from one tau to the next.
    bool warm_dual = true;
    /// Coordinates with |x_j| above this count as selected; 0 means 10 * outer_tol.
    double support_threshold = 0.0;
    /// Stop once the support reaches this many coordinates (0 = never).
    Index max_support = 0;
};

struct PathEntry
{
    double tau = 0;
    Vector solution;
    std::vector<Index> support;         ///< selected coordinates
    std::vector<Index> selected_groups; ///< groups contained in the support
    int outer_iterations = 0;
    double seconds = 0;
    bool converged = false;
    std::string error; ///< empty unless the solve failed
};

struct PathResult
{
    std::vector<PathEntry> entries;
    double sigma = 0;
    bool stopped_early = false;

    int total_outer_iterations() const
    {
        int s = 0;
        for (const auto& e : entries) s += e.outer_iterations;
        return s;
    }
    double total_seconds() const
    {
        double s = 0;
        for (const auto& e : entries) s += e.seconds;
        return s;
    }
    std::vector<double> taus() const
    {
        std::vector<double> t;
        for (const auto& e : entries) t.push_back(e.tau);
        return t;
    }
    Index failures() const
    {
        Index f = 0;
        for (const auto& e : entries) f += e.error.empty() ? 0 : 1;
        return f;
    }
};

/**
 * Solves for each tau in decreasing order, starting each solve from the
 * previous solution (zero for the first). A failed solve is recorded and the
 * next tau starts cold. The problem's own tau is ignored.
 */
inline PathResult regularization_path(const Problem& base, const std::vector<double>& taus,
                                      const SolverConfig& cfg, const PathOptions& opts = {})
{
    if (taus.empty()) throw input_error("regularization_path: empty tau list");
    for (std::size_t t = 0; t < taus.size(); ++t) {
        if (!(taus[t] > 0) || !std::isfinite(taus[t])) {
            throw input_error("regularization_path: tau values must be finite and > 0");
        }
        if (t > 0 && !(taus[t] < taus[t - 1])) {
            throw input_error("regularization_path: tau values must be strictly decreasing");
        }
    }
    Problem problem = base;
    problem.tau = taus.front();
    problem.validate();
    cfg.validate();

    const auto& gs = problem.groups;
    const bool repl = opts.mode == Mode::replication;
    SolverConfig run = cfg;
    PathResult res;
    res.sigma = cfg.sigma_override
                    ? *cfg.sigma_override
                    : lipschitz_sigma(repl ? replicated_design(problem.design, gs) : problem.design);
    run.sigma_override = res.sigma;
    const double threshold = opts.support_threshold > 0 ? opts.support_threshold : 10.0 * cfg.outer_tol;

    const Index dim = repl ? gs.replicated_dim() : gs.dim();
    Vector start = Vector::Zero(dim);
    DualWarmStart warm{Vector::Zero(gs.num_groups())};

    using clock = std::chrono::steady_clock;
    for (double tau : taus) {
        problem.tau = tau;
        PathEntry e;
        e.tau = tau;
        if (!opts.warm_dual) warm.multipliers.setZero();
        const auto t0 = clock::now();
        try {
            SolveDiagnostics diag;
            if (repl) {
                auto r = solve_replicated(problem, run, start);
                e.solution = std::move(r.solution);
                diag = std::move(r.diagnostics);
                start = opts.warm_start ? std::move(r.latent) : Vector::Zero(dim);
            } else {
                auto r = solve(problem, run, start, &warm);
                e.solution = std::move(r.solution);
                diag = std::move(r.diagnostics);
                start = opts.warm_start ? e.solution : Vector::Zero(dim);
            }
            e.outer_iterations = diag.iterations;
            e.converged = diag.converged;
        } catch (const std::exception& ex) {
            e.error = ex.what();
            e.solution = Vector::Zero(gs.dim());
            start.setZero();
            warm.multipliers.setZero();
        }
        e.seconds = std::chrono::duration<double>(clock::now() - t0).count();
        e.support = support(e.solution, threshold);
        e.selected_groups = selected_groups(gs, e.support);
        const bool stop = opts.max_support > 0 && static_cast<Index>(e.support.size()) >= opts.max_support;
        res.entries.push_back(std::move(e));
        if (stop) {
            res.stopped_early = true;
            break;
        }
    }
    return res;
}

struct AutoGridOptions
{
    int prepass_count = 500;
    double prepass_ratio = 1e-4; ///< prepass spans [ratio * tau_max, tau_max]
    double prepass_outer_tol = 1e-4;
    int count = 50;
};

struct AutoGrid
{
    double tau_min = 0;
    double tau_max = 0;
    std::vector<double> taus;
    int prepass_solves = 0;
};

/**
 * tau_max from the optimality condition at zero; tau_min as the smallest tau of a
 * loose-tolerance prepass whose solution selects fewer than n coordinates.
 */
inline AutoGrid auto_tau_grid(const Problem& problem, const SolverConfig& cfg,
                              const AutoGridOptions& opts = {})
{
    AutoGrid g;
    g.tau_max = tau_max(problem);
    if (!(g.tau_max > 0)) throw input_error("auto grid: tau_max is zero (response orthogonal to the design)");

    SolverConfig loose = cfg;
    loose.outer_tol = opts.prepass_outer_tol;
    PathOptions po;
    po.max_support = problem.samples();
    auto pre = regularization_path(problem, tau_grid(opts.prepass_ratio * g.tau_max, g.tau_max, opts.prepass_count),
                                   loose, po);
    g.prepass_solves = static_cast<int>(pre.entries.size());

    g.tau_min = g.tau_max;
    for (const auto& e : pre.entries) {
        if (e.error.empty() && static_cast<Index>(e.support.size()) < problem.samples()) g.tau_min = e.tau;
    }
    if (!(g.tau_min < g.tau_max)) g.tau_min = pre.entries.size() > 1 ? pre.entries[1].tau : 0.5 * g.tau_max;
    g.taus = tau_grid(g.tau_min, g.tau_max, opts.count);
    return g;
}

} // namespace gso
