#pragma once
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include <gso/group_model.hpp>

namespace gso {

/// Radial projection of the group block of w onto {||w||_{group,2} <= radius}; other
/// coordinates untouched.
inline void project_cylinder_p2_inplace(Eigen::Ref<Vector> w, std::span<const Index> group,
                                        double radius)
{
    const double nrm = detail::group_norm_unchecked(w, group, 2.0);
    if (nrm <= radius) return;
    const double scale = radius / nrm;
    for (auto j : group) w[j] *= scale;
}

inline Vector project_cylinder_p2(const Vector& w, std::span<const Index> group, double radius)
{
    if (!(radius > 0)) throw input_error("project_cylinder_p2: radius must be > 0");
    group_norm(w, group, 2.0); // validates indices
    Vector out = w;
    project_cylinder_p2_inplace(out, group, radius);
    return out;
}

/**
 * Euclidean projection of block onto the l1 ball of the given radius, in place.
 *
 * Soft-thresholding by mu, where mu comes from a search over the magnitudes
 * sorted in decreasing order a_1 >= ... >= a_g (a_{g+1} = 0): the first k with
 *   sum_{j<k} (a_j - a_k) <= radius <= sum_{j<=k} (a_j - a_{k+1})
 * gives mu = a_k + (sum_{j<k} (a_j - a_k) - radius) / k.
 */
inline void project_l1_ball_inplace(std::span<double> block, double radius,
                                    std::vector<double>& scratch)
{
    double l1 = 0;
    for (double v : block) l1 += std::abs(v);
    if (l1 <= radius) return;

    const std::size_t g = block.size();
    scratch.resize(g);
    for (std::size_t j = 0; j < g; ++j) scratch[j] = std::abs(block[j]);
    std::sort(scratch.begin(), scratch.end(), std::greater<>());

    double mu = 0;
    double prefix = 0; // sum_{j<k} a_j
    for (std::size_t k = 1; k <= g; ++k) {
        const double ak = scratch[k - 1];
        const double next = k < g ? scratch[k] : 0.0;
        const double lower = prefix - static_cast<double>(k - 1) * ak;
        const double upper = prefix + ak - static_cast<double>(k) * next;
        if (lower <= radius && radius <= upper) {
            mu = ak + (lower - radius) / static_cast<double>(k);
            break;
        }
        prefix += ak;
    }
    for (double& v : block) {
        const double m = std::abs(v) - mu;
        v = m > 0 ? std::copysign(m, v) : 0.0;
    }
}

inline Vector project_l1_ball(const Vector& w, double radius)
{
    if (!(radius > 0)) throw input_error("project_l1_ball: radius must be > 0");
    Vector out = w;
    std::vector<double> scratch;
    project_l1_ball_inplace(std::span<double>(out.data(), static_cast<std::size_t>(out.size())),
                            radius, scratch);
    return out;
}

/// Projects a gathered group block onto the ball {||b||_q <= radius}.
using SetProjector = std::function<void(std::span<double> block, double radius)>;

/// q = 2 ball: radial scaling.
struct L2BallProjector
{
    void operator()(std::span<double> block, double radius) const
    {
        double s = 0;
        for (double v : block) s += v * v;
        const double nrm = std::sqrt(s);
        if (nrm <= radius) return;
        const double scale = radius / nrm;
        for (double& v : block) v *= scale;
    }
};

/// q = 1 ball: sorted soft-threshold.
struct L1BallProjector
{
    void operator()(std::span<double> block, double radius)
    {
        project_l1_ball_inplace(block, radius, scratch);
    }
    std::vector<double> scratch;
};

struct CyclicOptions
{
    /// 0 selects the default budget min(100 * B * ceil(1/tol), 1e6).
    long max_iter = 0;
};

struct CyclicResult
{
    Vector point;
    long iterations = 0;
    double violation = 0;    ///< max_k (||w||_{G_k,q} - radius)_+ at exit
    double displacement = 0; ///< ||w^n - w^{n-B}|| over the last full cycle
};

inline long default_cyclic_budget(Index num_sets, double tol)
{
    const double per_tol = std::ceil(1.0 / tol);
    const double budget = 100.0 * static_cast<double>(num_sets) * per_tol;
    return static_cast<long>(std::min(budget, 1e6));
}

/**
 * Anchored cyclic projections onto the intersection of the sets
 * {||w||_{G_k,q} <= radius}, G_k ranging over the active set:
 *
 *   w^n = x / (n+1) + n / (n+1) * pi_{n mod B}(w^{n-1}),  w^0 = x.
 *
 * Internally u^n = (n+1)(w^n - x) is tracked instead of w^n; u only changes on
 * the coordinates of the set projected at step n, so a step costs O(|G_k|).
 *
 * Stops at the end of a cycle once the constraint violation and the
 * displacement over that cycle are both <= tol / 2.
 */
template <class Projector>
inline CyclicResult cyclic_project(const Vector& x, const ActiveSet& sets, double radius,
                                   double q, Projector&& project_set, double tol,
                                   const CyclicOptions& opts = {})
{
    if (sets.empty()) throw input_error("cyclic_project: no sets given");
    if (!(tol > 0)) throw input_error("cyclic_project: tolerance must be > 0");
    if (!(radius > 0)) throw input_error("cyclic_project: radius must be > 0");
    if (x.size() != sets.dim()) throw input_error("cyclic_project: dimension mismatch");

    const Index nsets = sets.num_active();
    const long max_iter = opts.max_iter > 0 ? opts.max_iter : default_cyclic_budget(nsets, tol);

    std::vector<Index> support;
    for (Index j = 0; j < x.size(); ++j) {
        if (!sets.groups_at(j).empty()) support.push_back(j);
    }

    Vector u = Vector::Zero(x.size());
    Vector w = x;
    Vector snapshot = x;
    std::vector<double> block;

    CyclicResult res;
    long n = 0;
    while (true) {
        for (Index k = 0; k < nsets; ++k) {
            ++n;
            const auto g = sets.coords(k);
            block.resize(g.size());
            const double inv_n = 1.0 / static_cast<double>(n);
            for (std::size_t i = 0; i < g.size(); ++i) block[i] = x[g[i]] + u[g[i]] * inv_n;
            project_set(std::span<double>(block), radius);
            const double dn = static_cast<double>(n);
            for (std::size_t i = 0; i < g.size(); ++i) u[g[i]] = dn * (block[i] - x[g[i]]);
        }

        const double inv = 1.0 / static_cast<double>(n + 1);
        double disp2 = 0;
        for (auto j : support) {
            w[j] = x[j] + u[j] * inv;
            const double dj = w[j] - snapshot[j];
            disp2 += dj * dj;
        }
        double viol = 0;
        for (Index k = 0; k < nsets; ++k) {
            viol = std::max(viol, detail::group_norm_unchecked(w, sets.coords(k), q) - radius);
        }
        res.violation = viol;
        res.displacement = std::sqrt(disp2);
        res.iterations = n;

        if (res.violation <= 0.5 * tol && res.displacement <= 0.5 * tol) break;
        if (n >= max_iter) {
            throw convergence_error("cyclic projections: no convergence after " +
                                        std::to_string(n) + " iterations (violation " +
                                        std::to_string(res.violation) + ", displacement " +
                                        std::to_string(res.displacement) + ")",
                                    std::max(res.violation, res.displacement), n);
        }
        for (auto j : support) snapshot[j] = w[j];
    }
    res.point = std::move(w);
    return res;
}

/// Type-erased overload for pluggable per-set projectors.
inline CyclicResult cyclic_project(const Vector& x, const ActiveSet& sets, double radius,
                                   double q, const SetProjector& project_set, double tol,
                                   const CyclicOptions& opts = {})
{
    return cyclic_project<const SetProjector&>(x, sets, radius, q, project_set, tol, opts);
}

/// Cyclic projection with the closed-form per-set projector for exponent p.
inline CyclicResult cyclic_project(const Vector& x, const ActiveSet& sets, double radius,
                                   Exponent p, double tol, const CyclicOptions& opts = {})
{
    const double q = conjugate_exponent(p);
    if (p == Exponent::two) return cyclic_project(x, sets, radius, q, L2BallProjector{}, tol, opts);
    return cyclic_project(x, sets, radius, q, L1BallProjector{}, tol, opts);
}

} // namespace gso
