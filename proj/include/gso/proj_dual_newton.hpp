#pragma once
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <gso/group_model.hpp>

namespace gso {

// Dual of the projection onto {v : ||v||_{G_r,2} <= tau, r active}:
//
//   f(lambda) = -sum_j x_j^2 / D_j - tau^2 sum_r lambda_r,  D_j = 1 + sum_{r : j in G_r} lambda_r
//
// maximized over lambda >= 0; the projection is v_j = x_j / D_j.

namespace detail {

inline void check_dual_args(const Vector& lambda, const Vector& x, const ActiveSet& active)
{
    if (x.size() != active.dim()) throw input_error("dual: point dimension mismatch");
    if (lambda.size() != active.num_active()) {
        throw input_error("dual: expected " + std::to_string(active.num_active()) +
                          " multipliers, got " + std::to_string(lambda.size()));
    }
    if ((lambda.array() < 0).any()) throw input_error("dual: multipliers must be >= 0");
}

inline void dual_denominators(const Vector& lambda, const ActiveSet& active, Vector& denom)
{
    const Index d = active.dim();
    denom.resize(d);
    for (Index j = 0; j < d; ++j) {
        double s = 1.0;
        for (auto k : active.groups_at(j)) s += lambda[k];
        denom[j] = s;
    }
}

inline double dual_value_from(const Vector& x, const Vector& denom, const Vector& lambda,
                              double tau)
{
    double f = 0;
    for (Index j = 0; j < x.size(); ++j) f -= x[j] * x[j] / denom[j];
    return f - tau * tau * lambda.sum();
}

inline void dual_gradient_from(const Vector& x, const Vector& denom, const ActiveSet& active,
                               double tau, Vector& grad)
{
    grad.resize(active.num_active());
    for (Index k = 0; k < active.num_active(); ++k) {
        double s = 0;
        for (auto j : active.coords(k)) {
            const double r = x[j] / denom[j];
            s += r * r;
        }
        grad[k] = s - tau * tau;
    }
}

/// Calls add(r, s, w) for every (r, s) pair with the weight 2 x_j^2 / D_j^3 of -H.
template <class Add>
inline void for_each_hessian_term(const Vector& x, const Vector& denom, const ActiveSet& active,
                                  Add&& add)
{
    for (Index j = 0; j < x.size(); ++j) {
        const auto gj = active.groups_at(j);
        if (gj.empty() || x[j] == 0.0) continue;
        const double dj = denom[j];
        const double w = 2.0 * x[j] * x[j] / (dj * dj * dj);
        for (auto r : gj) {
            for (auto s : gj) add(r, s, w);
        }
    }
}

} // namespace detail

inline double dual_value(const Vector& lambda, const Vector& x, double tau,
                         const ActiveSet& active)
{
    detail::check_dual_args(lambda, x, active);
    Vector denom;
    detail::dual_denominators(lambda, active, denom);
    return detail::dual_value_from(x, denom, lambda, tau);
}

inline Vector dual_gradient(const Vector& lambda, const Vector& x, double tau,
                            const ActiveSet& active)
{
    detail::check_dual_args(lambda, x, active);
    Vector denom, grad;
    detail::dual_denominators(lambda, active, denom);
    detail::dual_gradient_from(x, denom, active, tau, grad);
    return grad;
}

/// Dense Hessian of f; entry (r, s) vanishes when the groups are disjoint.
inline Matrix dual_hessian(const Vector& lambda, const Vector& x, double /*tau*/,
                           const ActiveSet& active)
{
    detail::check_dual_args(lambda, x, active);
    Vector denom;
    detail::dual_denominators(lambda, active, denom);
    const Index b = active.num_active();
    Matrix h = Matrix::Zero(b, b);
    detail::for_each_hessian_term(x, denom, active,
                                  [&](Index r, Index s, double w) { h(r, s) -= w; });
    return h;
}

inline Vector primal_from_dual(const Vector& lambda, const Vector& x, const ActiveSet& active)
{
    detail::check_dual_args(lambda, x, active);
    Vector denom;
    detail::dual_denominators(lambda, active, denom);
    return x.cwiseQuotient(denom);
}

struct NewtonOptions
{
    double eta = 0.5;          ///< backtracking factor
    double delta = 0.1;        ///< sufficient-increase constant
    double epsilon = 0.1;      ///< width of the bound-active index set
    int max_outer = 200;
    int max_backtracks = 60;
    double ridge = 1e-10;      ///< relative diagonal shift of -H before factorization
    Index dense_limit = 512;   ///< dense LDLT up to this many groups, sparse above
};

struct NewtonResult
{
    Vector multipliers;
    Vector projection;
    int iterations = 0;
    double kkt_residual = 0;  ///< ||lambda - [lambda + grad f]_+||
    double violation = 0;     ///< max_r (||v||_{G_r} - tau)_+
    double dual_value = 0;
    bool stalled = false;     ///< stopped because no floating-point progress was possible
};

/// Projected Newton could not make progress (singular model or failed line search);
/// the caller is expected to switch to another backend.
class newton_fallback : public convergence_error
{
public:
    newton_fallback(const std::string& what, double residual, long iterations, Vector best)
        : convergence_error(what, residual, iterations), best_(std::move(best))
    {}
    const Vector& best_multipliers() const noexcept { return best_; }

private:
    Vector best_;
};

/// Iteration budget exhausted; carries the best multipliers reached.
class newton_budget_error : public convergence_error
{
public:
    newton_budget_error(const std::string& what, double residual, long iterations, Vector best)
        : convergence_error(what, residual, iterations), best_(std::move(best))
    {}
    const Vector& best_multipliers() const noexcept { return best_; }

private:
    Vector best_;
};

/// Stopping threshold on the KKT residual for a requested distance tolerance.
inline double newton_kkt_tolerance(double tol, double tau, double x_norm)
{
    return std::max(tol * tol * tau / (1.0 + x_norm), 1e-13 * tau * tau);
}

/**
 * Bertsekas' projected Newton method on the (concave) dual, maximization form.
 *
 * Each iteration takes eps_n = min(eps, kkt residual), marks the bound-active
 * set I+ = {r : lambda_r <= eps_n, df/dr < 0}, decouples I+ in the Hessian,
 * steps to [lambda - a H^{-1} grad]_+ and backtracks a = eta^m until the
 * two-part sufficient-increase test holds.
 */
inline NewtonResult projected_newton(const Vector& x, double tau, const ActiveSet& active,
                                     const Vector& lambda_init, double tol,
                                     const NewtonOptions& opts = {})
{
    if (!(tau > 0)) throw input_error("projected_newton: tau must be > 0");
    if (!(tol > 0)) throw input_error("projected_newton: tolerance must be > 0");
    if (!(opts.eta > 0 && opts.eta < 1)) throw input_error("projected_newton: eta must be in (0,1)");
    if (!(opts.delta > 0 && opts.delta < 0.5)) {
        throw input_error("projected_newton: delta must be in (0,1/2)");
    }
    if (!(opts.epsilon > 0)) throw input_error("projected_newton: epsilon must be > 0");
    detail::check_dual_args(lambda_init, x, active);

    const Index b = active.num_active();
    const double kkt_tol = newton_kkt_tolerance(tol, tau, x.norm());
    const double tau2 = tau * tau;

    Vector lam = lambda_init;
    Vector denom, grad, trial, trial_denom, step;
    detail::dual_denominators(lam, active, denom);
    double f = detail::dual_value_from(x, denom, lam, tau);
    detail::dual_gradient_from(x, denom, active, tau, grad);

    std::vector<char> bound(b, 0);
    Matrix dense;
    Eigen::SparseMatrix<double> sparse;
    std::vector<Eigen::Triplet<double>> triplets;

    NewtonResult res;
    auto finish = [&](bool stalled) {
        res.multipliers = lam;
        res.projection = x.cwiseQuotient(denom);
        res.dual_value = f;
        res.stalled = stalled;
        return res;
    };

    for (int it = 0;; ++it) {
        const double kkt = (lam - (lam + grad).cwiseMax(0.0)).norm();
        double viol = 0;
        for (Index k = 0; k < b; ++k) viol = std::max(viol, std::sqrt(std::max(grad[k] + tau2, 0.0)) - tau);
        res.iterations = it;
        res.kkt_residual = kkt;
        res.violation = viol;
        if (kkt <= kkt_tol && viol <= 0.5 * tol) return finish(false);
        if (it >= opts.max_outer) {
            throw newton_budget_error("projected Newton: no convergence after " +
                                          std::to_string(it) + " iterations (kkt residual " +
                                          std::to_string(kkt) + ")",
                                      kkt, it, lam);
        }

        const double eps_n = std::min(opts.epsilon, kkt);
        for (Index k = 0; k < b; ++k) bound[k] = (lam[k] <= eps_n && grad[k] < 0) ? 1 : 0;

        // Factor A = -H (+ ridge) with off-diagonal entries of bound rows/cols removed.
        bool ok = true;
        if (b <= opts.dense_limit) {
            dense.setZero(b, b);
            detail::for_each_hessian_term(x, denom, active, [&](Index r, Index s, double w) {
                if (r == s || (!bound[r] && !bound[s])) dense(r, s) += w;
            });
            for (Index k = 0; k < b; ++k) dense(k, k) += opts.ridge * (1.0 + std::abs(dense(k, k)));
            Eigen::LDLT<Matrix> ldlt(dense);
            ok = ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0).all();
            if (ok) step = ldlt.solve(grad);
        } else {
            triplets.clear();
            detail::for_each_hessian_term(x, denom, active, [&](Index r, Index s, double w) {
                if (r >= s && (r == s || (!bound[r] && !bound[s]))) triplets.emplace_back(r, s, w);
            });
            sparse.resize(b, b);
            sparse.setFromTriplets(triplets.begin(), triplets.end());
            Vector diag = sparse.diagonal();
            for (Index k = 0; k < b; ++k) {
                sparse.coeffRef(k, k) += opts.ridge * (1.0 + std::abs(diag[k]));
            }
            Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower> ldlt(sparse);
            ok = ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0).all();
            if (ok) step = ldlt.solve(grad);
        }
        if (!ok || !step.allFinite()) {
            throw newton_fallback("projected Newton: singular Hessian model", kkt, it, lam);
        }

        // step = A^{-1} grad = -H^{-1} grad, an ascent direction.
        double pred_free = 0;
        for (Index k = 0; k < b; ++k) {
            if (!bound[k]) pred_free += grad[k] * step[k];
        }

        bool accepted = false;
        double a = 1.0;
        double pred_full = 0;
        for (int m = 0; m <= opts.max_backtracks; ++m, a *= opts.eta) {
            trial = (lam + a * step).cwiseMax(0.0);
            double pred_bound = 0;
            for (Index k = 0; k < b; ++k) {
                if (bound[k]) pred_bound += grad[k] * (trial[k] - lam[k]);
            }
            if (m == 0) pred_full = pred_free + pred_bound;
            detail::dual_denominators(trial, active, trial_denom);
            const double f_trial = detail::dual_value_from(x, trial_denom, trial, tau);
            if (f_trial - f >= opts.delta * (a * pred_free + pred_bound)) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            double scale = tau2 * lam.sum();
            for (Index j = 0; j < x.size(); ++j) scale += x[j] * x[j] / denom[j];
            if (pred_full <= 1e-13 * scale) {
                // The predicted gain is below the rounding level of f, so the increase test
                // cannot discriminate. Take the full step if f holds within rounding and the
                // KKT residual halves.
                trial = (lam + step).cwiseMax(0.0);
                detail::dual_denominators(trial, active, trial_denom);
                const double f_trial = detail::dual_value_from(x, trial_denom, trial, tau);
                Vector trial_grad;
                detail::dual_gradient_from(x, trial_denom, active, tau, trial_grad);
                const double trial_kkt = (trial - (trial + trial_grad).cwiseMax(0.0)).norm();
                if (f_trial >= f - 1e-13 * scale && trial_kkt <= 0.5 * kkt) {
                    accepted = true;
                } else if (viol <= 0.5 * tol) {
                    return finish(true);
                }
            }
            if (!accepted) throw newton_fallback("projected Newton: line search failed", kkt, it, lam);
        }

        lam.swap(trial);
        denom.swap(trial_denom);
        f = detail::dual_value_from(x, denom, lam, tau);
        detail::dual_gradient_from(x, denom, active, tau, grad);
    }
}

} // namespace gso
