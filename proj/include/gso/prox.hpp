#pragma once
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <gso/group_model.hpp>
#include <gso/proj_cyclic.hpp>
#include <gso/proj_dual_newton.hpp>

namespace gso {

enum class Backend { cyclic, dual_newton };

inline std::string to_string(Backend b) { return b == Backend::cyclic ? "cyclic" : "dual"; }

inline Backend parse_backend(const std::string& s)
{
    if (s == "cyclic") return Backend::cyclic;
    if (s == "dual" || s == "dual_newton" || s == "newton") return Backend::dual_newton;
    throw input_error("unknown projection backend '" + s + "' (expected cyclic or dual)");
}

struct ProxOptions
{
    Backend backend = Backend::dual_newton;
    CyclicOptions cyclic;
    NewtonOptions newton;
    bool allow_fallback = true; ///< switch to cyclic when projected Newton gives up
};

/// Dual multipliers indexed by group id; read as the starting point of the next
/// dual-Newton projection and overwritten with its solution.
struct DualWarmStart
{
    Vector multipliers;
};

struct Projection
{
    Vector point;
    long iterations = 0;
    double residual = 0;
    Backend backend_used = Backend::dual_newton;
    bool fell_back = false;
    Vector multipliers; ///< by active position; empty unless dual Newton produced the point
};

struct ProxResult
{
    Vector prox_point;
    Vector projection_point;
    ActiveSet active_set;
    long backend_iterations = 0;
    double achieved_tolerance_estimate = 0;
    Backend backend_used = Backend::dual_newton;
    bool fell_back = false;
    Vector multipliers;
};

namespace detail {

inline void check_backend(Exponent p, Backend b)
{
    if (b == Backend::dual_newton && p != Exponent::two) {
        throw input_error("the dual Newton backend only supports p = 2");
    }
}

} // namespace detail

/**
 * Projection of x onto radius * K restricted to the groups in active.
 * The multipliers in warm (if given) seed projected Newton and receive its solution.
 */
inline Projection project_intersection(const Vector& x, double radius, const GroupStructure& gs,
                                       const ActiveSet& active, Exponent p,
                                       const ProxOptions& opts, double tol,
                                       DualWarmStart* warm = nullptr)
{
    detail::check_backend(p, opts.backend);
    Projection out;
    if (active.empty()) {
        out.point = x;
        out.backend_used = opts.backend;
        return out;
    }
    if (opts.backend == Backend::dual_newton) {
        Vector init = Vector::Zero(active.num_active());
        if (warm && warm->multipliers.size() == gs.num_groups()) {
            for (Index k = 0; k < active.num_active(); ++k) {
                init[k] = std::max(0.0, warm->multipliers[active.members()[k]]);
            }
        }
        try {
            auto nr = projected_newton(x, radius, active, init, tol, opts.newton);
            if (warm) {
                warm->multipliers = Vector::Zero(gs.num_groups());
                for (Index k = 0; k < active.num_active(); ++k) {
                    warm->multipliers[active.members()[k]] = nr.multipliers[k];
                }
            }
            out.point = std::move(nr.projection);
            out.iterations = nr.iterations;
            out.residual = std::max(nr.violation, nr.kkt_residual / (2.0 * radius));
            out.backend_used = Backend::dual_newton;
            out.multipliers = std::move(nr.multipliers);
            return out;
        } catch (const newton_fallback&) {
            if (!opts.allow_fallback) throw;
            out.fell_back = true;
            if (warm) warm->multipliers = Vector::Zero(gs.num_groups());
        }
    }
    auto cr = cyclic_project(x, active, radius, p, tol, opts.cyclic);
    out.point = std::move(cr.point);
    out.iterations = cr.iterations;
    out.residual = std::max(cr.violation, cr.displacement);
    out.backend_used = Backend::cyclic;
    return out;
}

/// prox_{lambda Omega}(x) = x - pi_{lambda K}(x), with the projection restricted to the
/// groups whose q-norm exceeds lambda.
inline ProxResult prox(const Vector& x, double lambda, const GroupStructure& gs, Exponent p,
                       const ProxOptions& opts, double tol, DualWarmStart* warm = nullptr)
{
    if (!(lambda > 0)) throw input_error("prox: lambda must be > 0");
    if (!(tol > 0)) throw input_error("prox: tolerance must be > 0");
    if (x.size() != gs.dim()) throw input_error("prox: dimension mismatch");
    detail::check_backend(p, opts.backend);

    ProxResult res;
    res.active_set = active_groups(x, lambda, gs, conjugate_exponent(p));
    if (res.active_set.empty()) {
        res.prox_point = Vector::Zero(x.size());
        res.projection_point = x;
        res.backend_used = opts.backend;
        if (warm) warm->multipliers = Vector::Zero(gs.num_groups());
        return res;
    }
    auto proj = project_intersection(x, lambda, gs, res.active_set, p, opts, tol, warm);
    res.projection_point = std::move(proj.point);
    res.prox_point = x - res.projection_point;
    res.backend_iterations = proj.iterations;
    res.achieved_tolerance_estimate = proj.residual;
    res.backend_used = proj.backend_used;
    res.fell_back = proj.fell_back;
    res.multipliers = std::move(proj.multipliers);
    return res;
}

inline ProxResult prox(const Vector& x, double lambda, const GroupStructure& gs, Exponent p,
                       Backend backend, double tol, DualWarmStart* warm = nullptr)
{
    ProxOptions opts;
    opts.backend = backend;
    return prox(x, lambda, gs, p, opts, tol, warm);
}

inline Backend default_backend(Exponent p)
{
    return p == Exponent::two ? Backend::dual_newton : Backend::cyclic;
}

namespace detail {

/// Latent decomposition read off a dual-Newton projection of z onto K:
/// z - u = P* v with v_r = lambda_r u|G_r. Returns sum_r ||v_r + c_r||_2 / step, where
/// c routes the residual x - P* v / step to the first group of each coordinate, so the
/// result is an upper bound on Omega(x).
inline double latent_upper_bound(const Vector& x, const Vector& u, const GroupStructure& gs,
                                 const ActiveSet& active, const Vector& multipliers, double step)
{
    Vector v = Vector::Zero(gs.replicated_dim());
    Vector covered = Vector::Zero(gs.dim());
    for (Index k = 0; k < active.num_active(); ++k) {
        const Index r = active.members()[k];
        Index off = gs.offset(r);
        for (auto j : gs.group(r)) {
            v[off] = multipliers[k] * u[j] / step;
            covered[j] += v[off];
            ++off;
        }
    }
    for (Index j = 0; j < gs.dim(); ++j) {
        const double e = x[j] - covered[j];
        if (e == 0.0) continue;
        const Index r = gs.groups_of(j).front();
        const auto g = gs.group(r);
        const Index pos = std::lower_bound(g.begin(), g.end(), j) - g.begin();
        v[gs.offset(r) + pos] += e;
    }
    double total = 0;
    for (Index r = 0; r < gs.num_groups(); ++r) total += v.segment(gs.offset(r), gs.group_size(r)).norm();
    return total;
}

/// Exact Omega for p = infinity: max <x, u> s.t. ||u_G||_1 <= 1, as a linear program
/// in (u+, u-) solved by the tableau simplex with Bland's rule from the origin.
inline double linf_penalty_simplex(const Vector& x, const GroupStructure& gs)
{
    const Index d = gs.dim();
    const Index m = gs.num_groups();
    const Index n = 2 * d + m;
    Matrix t = Matrix::Zero(m + 1, n + 1);
    for (Index r = 0; r < m; ++r) {
        for (auto j : gs.group(r)) {
            t(r, j) = 1.0;
            t(r, d + j) = 1.0;
        }
        t(r, 2 * d + r) = 1.0;
        t(r, n) = 1.0;
    }
    for (Index j = 0; j < d; ++j) {
        t(m, j) = x[j];
        t(m, d + j) = -x[j];
    }
    std::vector<Index> basis(m);
    for (Index r = 0; r < m; ++r) basis[r] = 2 * d + r;

    const double eps = 1e-12 * std::max(1.0, x.cwiseAbs().maxCoeff());
    for (long it = 0; it < 100L * (n + m) + 1000; ++it) {
        Index enter = -1;
        for (Index j = 0; j < n; ++j) {
            if (t(m, j) > eps) {
                enter = j;
                break;
            }
        }
        if (enter < 0) return -t(m, n);
        Index leave = -1;
        double best = infinity;
        for (Index r = 0; r < m; ++r) {
            if (t(r, enter) <= 1e-12) continue;
            const double ratio = t(r, n) / t(r, enter);
            if (ratio < best - 1e-15 || (ratio <= best + 1e-15 && leave >= 0 && basis[r] < basis[leave])) {
                best = ratio;
                leave = r;
            }
        }
        if (leave < 0) return infinity;
        t.row(leave) /= t(leave, enter);
        for (Index r = 0; r <= m; ++r) {
            if (r != leave && t(r, enter) != 0.0) t.row(r) -= t(r, enter) * t.row(leave);
        }
        basis[leave] = enter;
    }
    throw convergence_error("penalty_value: simplex iteration limit reached", 0.0, 0);
}

} // namespace detail

/**
 * Omega(x) = sup_{u in K} <x, u>, the support function of K.
 *
 * Proximal-point ascent on the linear objective: u <- pi_K(u + s x) with s
 * doubling from 1/||x||. Every iterate, rescaled into K, gives a lower bound.
 * When the projection comes from dual Newton its multipliers give a latent
 * decomposition of x and hence an upper bound; otherwise the ascent gap
 * bound ||u*||^2 / (2 sum s_i) <= covered / (2 sum s_i) is used. Stops once
 * the certified gap is at most tol and returns the midpoint of the bounds.
 * For p = infinity the value is a linear program and is computed exactly.
 */
inline double penalty_value(const Vector& x, const GroupStructure& gs, Exponent p,
                            double tol = 1e-6, ProxOptions opts = {}, int max_steps = 200)
{
    if (x.size() != gs.dim()) throw input_error("penalty_value: dimension mismatch");
    if (!(tol > 0)) throw input_error("penalty_value: tolerance must be > 0");
    opts.backend = p == Exponent::two ? opts.backend : Backend::cyclic;

    const double xnorm = x.norm();
    if (xnorm == 0.0) return 0.0;
    for (Index j = 0; j < x.size(); ++j) {
        if (x[j] != 0.0 && gs.multiplicity(j) == 0) return infinity;
    }

    if (p == Exponent::infinity) return detail::linf_penalty_simplex(x, gs);

    const double q = conjugate_exponent(p);
    const double radius_bound = static_cast<double>(gs.covered_count());
    const double inner_tol = std::min(1e-3, tol / (4.0 * std::max(xnorm, 1.0)));

    Vector u = Vector::Zero(x.size());
    DualWarmStart warm{Vector::Zero(gs.num_groups())};
    double step = 1.0 / xnorm;
    double step_sum = 0;
    double lower = 0;
    double upper = infinity;
    for (int k = 0; k < max_steps; ++k) {
        Vector z = u + step * x;
        auto active = active_groups(z, 1.0, gs, q);
        auto proj = project_intersection(z, 1.0, gs, active, p, opts, inner_tol, &warm);
        u = std::move(proj.point);
        step_sum += step;

        double scale = 1.0;
        for (Index r = 0; r < gs.num_groups(); ++r) {
            scale = std::max(scale, detail::group_norm_unchecked(u, gs.group(r), q));
        }
        lower = std::max(lower, x.dot(u) / scale);
        upper = std::min(upper, lower + radius_bound / (2.0 * step_sum));
        if (proj.multipliers.size() == active.num_active() && !active.empty()) {
            upper = std::min(upper, detail::latent_upper_bound(x, u, gs, active, proj.multipliers, step));
        }
        if (upper - lower <= tol) return 0.5 * (lower + upper);

        step *= 2.0;
        warm.multipliers = 2.0 * warm.multipliers.array() + (warm.multipliers.array() > 0).cast<double>();
    }
    throw convergence_error("penalty_value: gap above tolerance after " + std::to_string(max_steps) + " steps",
                            upper - lower, max_steps);
}

/// Group-wise prox of lambda * sum_r ||v_r||_p in the latent space (disjoint blocks, exact).
inline Vector prox_replicated(const Vector& v, double lambda, const GroupStructure& gs, Exponent p)
{
    if (!(lambda > 0)) throw input_error("prox_replicated: lambda must be > 0");
    if (v.size() != gs.replicated_dim()) throw input_error("prox_replicated: dimension mismatch");
    Vector out = v;
    std::vector<double> scratch, block;
    for (Index r = 0; r < gs.num_groups(); ++r) {
        const Index off = gs.offset(r);
        const Index len = gs.group_size(r);
        auto seg = out.segment(off, len);
        if (p == Exponent::two) {
            const double nrm = seg.norm();
            seg *= nrm > lambda ? 1.0 - lambda / nrm : 0.0;
        } else {
            block.assign(seg.data(), seg.data() + len);
            project_l1_ball_inplace(block, lambda, scratch);
            for (Index i = 0; i < len; ++i) seg[i] -= block[i];
        }
    }
    return out;
}

} // namespace gso
