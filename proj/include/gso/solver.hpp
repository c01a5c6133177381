#pragma once
#include <cmath>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include <gso/group_model.hpp>
#include <gso/prox.hpp>

namespace gso {

/// Least squares with the latent group penalty:
///   min_x (1/n) ||Psi x - y||^2 + 2 tau Omega(x)
struct Problem
{
    Matrix design;   ///< n x d
    Vector response; ///< n
    double tau = 1.0;
    GroupStructure groups;
    Exponent p = Exponent::two;

    Index samples() const noexcept { return design.rows(); }
    Index features() const noexcept { return design.cols(); }

    void validate() const
    {
        if (design.rows() < 1 || design.cols() < 1) throw input_error("problem: empty design matrix");
        if (response.size() != design.rows()) {
            throw input_error("problem: response has " + std::to_string(response.size()) +
                              " entries, design has " + std::to_string(design.rows()) + " rows");
        }
        if (groups.dim() != design.cols()) {
            throw input_error("problem: groups cover dimension " + std::to_string(groups.dim()) +
                              ", design has " + std::to_string(design.cols()) + " columns");
        }
        if (!(tau > 0)) throw input_error("problem: tau must be > 0");
    }
};

enum class Algorithm { ista, fista };

inline std::string to_string(Algorithm a) { return a == Algorithm::ista ? "ista" : "fista"; }

inline Algorithm parse_algorithm(const std::string& s)
{
    if (s == "ista") return Algorithm::ista;
    if (s == "fista") return Algorithm::fista;
    throw input_error("unknown algorithm '" + s + "' (expected ista or fista)");
}

struct IterationRecord
{
    int iteration = 0;
    Index active_groups = 0;
    long inner_iterations = 0;
    double inner_tol = 0;
    double inner_residual = 0;
    double displacement = 0;
    bool fell_back = false;
};

struct SolverConfig
{
    Algorithm algorithm = Algorithm::fista;
    double eps0 = 1.0;
    /// Inner tolerance exponent; unset means 4.1 for FISTA and 2.1 for ISTA.
    std::optional<double> alpha;
    double outer_tol = 1e-6;
    int max_outer = 10000;
    ProxOptions prox;
    std::optional<double> sigma_override;
    /// Lower bound on the inner tolerance eps0 * m^-alpha. 0 keeps the schedule exact.
    double inner_tol_floor = 0.0;
    /// Accept alpha at or below the rate thresholds (2 for ISTA, 4 for FISTA) with a warning.
    bool allow_weak_schedule = false;

    std::function<void(int, const Vector&)> on_iterate;
    std::function<void(const Vector&, const ProxResult&, double)> on_prox;

    double effective_alpha() const
    {
        return alpha.value_or(algorithm == Algorithm::fista ? 4.1 : 2.1);
    }

    void validate() const
    {
        if (!(eps0 > 0)) throw input_error("solver: eps0 must be > 0");
        if (!(outer_tol >= 0)) throw input_error("solver: outer_tol must be >= 0");
        if (max_outer < 1) throw input_error("solver: max_outer must be >= 1");
        const double a = effective_alpha();
        if (!(a > 0)) throw input_error("solver: alpha must be > 0");
        const double needed = algorithm == Algorithm::fista ? 4.0 : 2.0;
        if (!(a > needed)) {
            const std::string msg = "solver: alpha = " + std::to_string(a) + " does not exceed " +
                                    std::to_string(needed) + " required for the " +
                                    to_string(algorithm) + " rate";
            if (!allow_weak_schedule) throw input_error(msg);
            std::cerr << "warning: " << msg << '\n';
        }
    }
};

struct SolveDiagnostics
{
    int iterations = 0;
    bool converged = false;
    double sigma = 0;
    double final_displacement = 0;
    long total_inner_iterations = 0;
    int fallbacks = 0;
    std::vector<IterationRecord> history;
};

struct SolveResult
{
    Vector solution;
    SolveDiagnostics diagnostics;
};

struct ReplicatedSolveResult
{
    Vector latent;
    Vector solution; ///< adjoint_sum(latent)
    SolveDiagnostics diagnostics;
};

/// ||Psi^T Psi|| / n by power iteration, inflated by 1% so 1/sigma is a valid step.
inline double lipschitz_sigma(const Matrix& design)
{
    if (design.rows() < 1 || design.cols() < 1) throw input_error("lipschitz_sigma: empty operator");
    if (design.cwiseAbs().maxCoeff() == 0.0) throw input_error("lipschitz_sigma: zero operator");

    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> normal;
    Vector v(design.cols());
    for (Index j = 0; j < v.size(); ++j) v[j] = normal(rng);
    v.normalize();

    double est = 0;
    for (int it = 0; it < 20000; ++it) {
        Vector w = design.transpose() * (design * v);
        const double next = v.dot(w);
        const double wn = w.norm();
        if (wn == 0.0) break;
        v = w / wn;
        if (std::abs(next - est) <= 1e-12 * std::abs(next)) {
            est = next;
            break;
        }
        est = next;
    }
    return 1.01 * est / static_cast<double>(design.rows());
}

/// h - (1/(n sigma)) Psi^T (Psi h - y), i.e. h - grad F(h) / (2 sigma).
inline Vector gradient_step(const Vector& h, const Matrix& design, const Vector& response,
                            double sigma)
{
    if (!(sigma > 0)) throw input_error("gradient_step: sigma must be > 0");
    const double c = 1.0 / (static_cast<double>(design.rows()) * sigma);
    return h - c * (design.transpose() * (design * h - response));
}

inline Vector gradient_step(const Vector& h, const Problem& problem, double sigma)
{
    return gradient_step(h, problem.design, problem.response, sigma);
}

/// (1/n) ||Psi x - y||^2
inline double data_fit(const Matrix& design, const Vector& response, const Vector& x)
{
    return (design * x - response).squaredNorm() / static_cast<double>(design.rows());
}

/// Full objective with Omega evaluated by penalty_value.
inline double objective(const Problem& problem, const Vector& x, double penalty_tol = 1e-9)
{
    return data_fit(problem.design, problem.response, x) +
           2.0 * problem.tau * penalty_value(x, problem.groups, problem.p, penalty_tol);
}

/// Objective of the latent formulation: (1/n) ||Psi P* v - y||^2 + 2 tau sum_r ||v_r||_p.
inline double replicated_objective(const Problem& problem, const Vector& latent)
{
    const auto& gs = problem.groups;
    double pen = 0;
    for (Index r = 0; r < gs.num_groups(); ++r) {
        auto seg = latent.segment(gs.offset(r), gs.group_size(r));
        pen += problem.p == Exponent::two ? seg.norm() : seg.cwiseAbs().maxCoeff();
    }
    return data_fit(problem.design, problem.response, adjoint_sum(gs, latent)) +
           2.0 * problem.tau * pen;
}

/// Psi P*: one column per latent slot.
inline Matrix replicated_design(const Matrix& design, const GroupStructure& gs)
{
    Matrix out(design.rows(), gs.replicated_dim());
    for (Index r = 0; r < gs.num_groups(); ++r) {
        Index k = gs.offset(r);
        for (auto j : gs.group(r)) out.col(k++) = design.col(j);
    }
    return out;
}

namespace detail {

inline void check_finite(const Vector& v, const char* what, int m)
{
    if (!v.allFinite()) {
        throw numerical_error(std::string("non-finite ") + what + " at outer iteration " +
                              std::to_string(m));
    }
}

/// Shared ISTA/FISTA driver. step(h, m, record) returns the prox-gradient iterate.
template <class Step>
inline SolveDiagnostics run_outer(const Vector& x0, const SolverConfig& cfg, Step&& step,
                                  Vector& x_out)
{
    SolveDiagnostics diag;
    Vector x_prev = x0;
    Vector h = x0;
    Vector x;
    double s = 1.0;
    for (int m = 1; m <= cfg.max_outer; ++m) {
        IterationRecord rec;
        rec.iteration = m;
        x = step(h, m, rec);
        check_finite(x, "iterate", m);

        rec.displacement = (x - x_prev).norm() / std::max(x_prev.norm(), 1.0);
        diag.total_inner_iterations += rec.inner_iterations;
        diag.fallbacks += rec.fell_back ? 1 : 0;
        diag.history.push_back(rec);
        diag.iterations = m;
        diag.final_displacement = rec.displacement;
        if (cfg.on_iterate) cfg.on_iterate(m, x);

        if (m >= 2 && rec.displacement <= cfg.outer_tol) {
            diag.converged = true;
            break;
        }
        if (cfg.algorithm == Algorithm::fista) {
            const double s_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * s * s));
            h = (1.0 + (s - 1.0) / s_next) * x + ((1.0 - s) / s_next) * x_prev;
            s = s_next;
        } else {
            h = x;
        }
        x_prev.swap(x);
    }
    // On convergence the last iterate is x; otherwise the final swap moved it into x_prev.
    x_out = diag.converged ? std::move(x) : std::move(x_prev);
    return diag;
}

} // namespace detail

/**
 * Inexact accelerated proximal gradient for the latent group penalty.
 *
 * Each outer step: gradient step at h^m, active groups at level tau/sigma,
 * projection onto (tau/sigma) K restricted to them with tolerance eps0 m^-alpha,
 * prox by subtraction, then the FISTA (or ISTA) update.
 */
inline SolveResult solve(const Problem& problem, const SolverConfig& cfg, const Vector& x0,
                         DualWarmStart* warm = nullptr)
{
    problem.validate();
    cfg.validate();
    if (x0.size() != problem.features()) throw input_error("solve: initial point dimension mismatch");
    if (!x0.allFinite()) throw input_error("solve: initial point is not finite");
    detail::check_backend(problem.p, cfg.prox.backend);

    const double sigma = cfg.sigma_override ? *cfg.sigma_override : lipschitz_sigma(problem.design);
    const double level = problem.tau / sigma;
    const double alpha = cfg.effective_alpha();

    DualWarmStart local{Vector::Zero(problem.groups.num_groups())};
    DualWarmStart* ws = warm ? warm : &local;
    if (ws->multipliers.size() != problem.groups.num_groups()) {
        ws->multipliers = Vector::Zero(problem.groups.num_groups());
    }

    auto step = [&](const Vector& h, int m, IterationRecord& rec) {
        Vector hh = gradient_step(h, problem, sigma);
        detail::check_finite(hh, "gradient step", m);
        const double tol = std::max(cfg.eps0 * std::pow(static_cast<double>(m), -alpha),
                                    cfg.inner_tol_floor);
        ProxResult pr;
        try {
            pr = prox(hh, level, problem.groups, problem.p, cfg.prox, tol, ws);
        } catch (const convergence_error& e) {
            throw convergence_error("outer iteration " + std::to_string(m) + ": " + e.what(),
                                    e.residual(), m);
        }
        if (cfg.on_prox) cfg.on_prox(hh, pr, tol);
        rec.active_groups = pr.active_set.num_active();
        rec.inner_iterations = pr.backend_iterations;
        rec.inner_tol = tol;
        rec.inner_residual = pr.achieved_tolerance_estimate;
        rec.fell_back = pr.fell_back;
        return std::move(pr.prox_point);
    };

    SolveResult res;
    res.diagnostics = detail::run_outer(x0, cfg, step, res.solution);
    res.diagnostics.sigma = sigma;
    return res;
}

/// FISTA/ISTA on the replicated (latent, non-overlapping) formulation with the exact
/// group-wise prox.
inline ReplicatedSolveResult solve_replicated(const Problem& problem, const SolverConfig& cfg,
                                              const Vector& v0)
{
    problem.validate();
    cfg.validate();
    const auto& gs = problem.groups;
    if (v0.size() != gs.replicated_dim()) throw input_error("solve_replicated: latent dimension mismatch");
    if (!v0.allFinite()) throw input_error("solve_replicated: initial point is not finite");

    const Matrix design = replicated_design(problem.design, gs);
    const double sigma = cfg.sigma_override ? *cfg.sigma_override : lipschitz_sigma(design);
    const double level = problem.tau / sigma;

    auto step = [&](const Vector& h, int m, IterationRecord& rec) {
        Vector hh = gradient_step(h, design, problem.response, sigma);
        detail::check_finite(hh, "gradient step", m);
        rec.active_groups = 0;
        return prox_replicated(hh, level, gs, problem.p);
    };

    ReplicatedSolveResult res;
    res.diagnostics = detail::run_outer(v0, cfg, step, res.latent);
    res.diagnostics.sigma = sigma;
    res.solution = adjoint_sum(gs, res.latent);
    return res;
}

/// Coordinates with |x_j| > threshold, ascending.
inline std::vector<Index> support(const Vector& x, double threshold = 0.0)
{
    std::vector<Index> s;
    for (Index j = 0; j < x.size(); ++j) {
        if (std::abs(x[j]) > threshold) s.push_back(j);
    }
    return s;
}

/// Groups entirely contained in the support.
inline std::vector<Index> selected_groups(const GroupStructure& gs, const std::vector<Index>& supp)
{
    std::vector<char> in(gs.dim(), 0);
    for (auto j : supp) in[j] = 1;
    std::vector<Index> out;
    for (Index r = 0; r < gs.num_groups(); ++r) {
        bool all = true;
        for (auto j : gs.group(r)) {
            if (!in[j]) {
                all = false;
                break;
            }
        }
        if (all) out.push_back(r);
    }
    return out;
}

} // namespace gso
