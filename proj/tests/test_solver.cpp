#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace gso;

namespace {

Problem random_problem(std::mt19937_64& rng, Index n, Index d, Index b, double tau_fraction)
{
    Problem pb;
    pb.design = oracle::random_matrix(n, d, rng);
    pb.response = oracle::random_normal(n, rng);
    pb.groups = oracle::random_groups(d, b, rng);
    pb.tau = tau_fraction * tau_max(pb);
    return pb;
}

} // namespace

TEST(Lipschitz, IdentityAndScalar)
{
    const Index n = 7;
    EXPECT_NEAR(lipschitz_sigma(Matrix::Identity(n, n)), 1.01 / n, 1e-6 * 1.01 / n);
    EXPECT_NEAR(lipschitz_sigma(Matrix::Constant(1, 1, 3.0)), 9.0 * 1.01, 1e-6 * 9.0);
}

TEST(Lipschitz, MatchesDenseEigensolver)
{
    std::mt19937_64 rng(30);
    for (int t = 0; t < 5; ++t) {
        Matrix a = oracle::random_matrix(20, 50, rng);
        const double expect = 1.01 * oracle::largest_gram_eigenvalue(a) / 20.0;
        EXPECT_NEAR(lipschitz_sigma(a), expect, 1e-5 * expect);
    }
}

TEST(Lipschitz, ZeroOperatorRejected)
{
    EXPECT_THROW(lipschitz_sigma(Matrix::Zero(3, 3)), input_error);
}

TEST(GradientStep, FixedWhenResidualZero)
{
    std::mt19937_64 rng(31);
    Matrix a = oracle::random_matrix(5, 3, rng);
    Vector h = oracle::random_normal(3, rng);
    Vector y = a * h;
    EXPECT_LE((gradient_step(h, a, y, 2.0) - h).norm(), 1e-14);
}

TEST(GradientStep, ScalarCase)
{
    Matrix a = Matrix::Identity(1, 1);
    Vector y = Vector::Zero(1);
    Vector h = Vector::Ones(1);
    EXPECT_NEAR(gradient_step(h, a, y, 1.01)[0], 1.0 - 1.0 / 1.01, 1e-15);
}

TEST(GradientStep, FiniteDifferenceGradient)
{
    std::mt19937_64 rng(32);
    for (int t = 0; t < 10; ++t) {
        Matrix a = oracle::random_matrix(8, 5, rng);
        Vector y = oracle::random_normal(8, rng);
        Vector h = oracle::random_normal(5, rng);
        const double sigma = 1.7;
        // h - grad F(h) / (2 sigma)
        Vector grad = -2.0 * sigma * (gradient_step(h, a, y, sigma) - h);
        auto f = [&](const Vector& z) { return data_fit(a, y, z); };
        for (Index k = 0; k < 5; ++k) {
            const double fd = oracle::central_difference(f, h, k, 1e-6);
            EXPECT_NEAR(grad[k], fd, 1e-5 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST(Solve, ZeroAboveTauMax)
{
    std::mt19937_64 rng(33);
    for (int t = 0; t < 5; ++t) {
        auto pb = random_problem(rng, 30, 12, 5, 1.0);
        pb.tau *= 1.01;
        auto r = solve(pb, SolverConfig{}, Vector::Zero(12));
        EXPECT_LE(r.solution.norm(), 1e-6);
    }
}

TEST(Solve, SingleGroupIdentityClosedForm)
{
    Problem pb;
    pb.design = Matrix::Identity(3, 3);
    pb.response = (Vector(3) << 3, 4, 12).finished();
    pb.groups = GroupStructure(3, {{0, 1, 2}});
    pb.tau = 1.5;
    SolverConfig cfg;
    cfg.outer_tol = 1e-12;
    auto r = solve(pb, cfg, Vector::Zero(3));
    // (1/n)||x - y||^2 + 2 tau ||x||: group soft threshold of y at n tau
    const double n = 3;
    Vector expect = pb.response * (1.0 - n * pb.tau / pb.response.norm());
    EXPECT_LE((r.solution - expect).norm(), 1e-8);
}

TEST(Solve, MatchesReplicatedObjective)
{
    std::mt19937_64 rng(34);
    Problem pb;
    pb.design = oracle::random_matrix(20, 6, rng);
    pb.response = oracle::random_normal(20, rng);
    pb.groups = GroupStructure(6, {{0, 1, 2, 3}, {2, 3, 4, 5}});
    pb.tau = 0.3 * tau_max(pb);
    SolverConfig cfg;
    cfg.outer_tol = 1e-11;
    auto a = solve(pb, cfg, Vector::Zero(6));
    auto b = solve_replicated(pb, cfg, Vector::Zero(pb.groups.replicated_dim()));
    const double oa = objective(pb, a.solution, 1e-12);
    const double ob = objective(pb, b.solution, 1e-12);
    EXPECT_LE(std::abs(oa - ob), 1e-6 * ob);
    EXPECT_LE(std::abs(replicated_objective(pb, b.latent) - ob), 1e-6 * ob);
}

TEST(Solve, DisjointGroupsAgreeWithReplication)
{
    std::mt19937_64 rng(35);
    Problem pb;
    pb.design = oracle::random_matrix(25, 8, rng);
    pb.response = oracle::random_normal(25, rng);
    pb.groups = GroupStructure(8, {{0, 1, 2}, {3, 4}, {5, 6, 7}});
    pb.tau = 0.4 * tau_max(pb);
    SolverConfig cfg;
    cfg.outer_tol = 1e-12;
    auto a = solve(pb, cfg, Vector::Zero(8));
    auto b = solve_replicated(pb, cfg, Vector::Zero(8));
    EXPECT_LE((a.solution - b.solution).norm(), 1e-6);
}

TEST(Solve, ZeroResponse)
{
    std::mt19937_64 rng(36);
    auto pb = random_problem(rng, 10, 6, 3, 0.5);
    pb.response.setZero();
    pb.tau = 0.1;
    auto r = solve_replicated(pb, SolverConfig{}, Vector::Zero(pb.groups.replicated_dim()));
    EXPECT_EQ(r.latent, Vector::Zero(pb.groups.replicated_dim()));
    EXPECT_EQ(solve(pb, SolverConfig{}, Vector::Zero(6)).solution, Vector::Zero(6));
}

TEST(Solve, IstaMonotoneObjective)
{
    std::mt19937_64 rng(37);
    auto pb = random_problem(rng, 30, 10, 4, 0.3);
    SolverConfig cfg;
    cfg.algorithm = Algorithm::ista;
    cfg.eps0 = 1e-8;
    cfg.max_outer = 60;
    cfg.outer_tol = 0;
    std::vector<double> values;
    cfg.on_iterate = [&](int, const Vector& x) { values.push_back(objective(pb, x, 1e-10)); };
    solve(pb, cfg, Vector::Zero(10));
    for (std::size_t k = 1; k < values.size(); ++k) EXPECT_LE(values[k], values[k - 1] + 1e-8);
}

TEST(Solve, SupportIsUnionOfGroups)
{
    std::mt19937_64 rng(38);
    for (int t = 0; t < 5; ++t) {
        auto pb = random_problem(rng, 40, 15, 6, 0.4);
        SolverConfig cfg;
        auto r = solve(pb, cfg, Vector::Zero(15));
        auto supp = support(r.solution, 10 * cfg.outer_tol);
        std::vector<char> covered(15, 0);
        for (auto g : selected_groups(pb.groups, supp)) {
            for (auto j : pb.groups.group(g)) covered[j] = 1;
        }
        for (auto j : supp) EXPECT_TRUE(covered[j]);
    }
}

TEST(Solve, DiagnosticsAndObservers)
{
    std::mt19937_64 rng(39);
    auto pb = random_problem(rng, 30, 10, 4, 0.3);
    SolverConfig cfg;
    int prox_calls = 0;
    double worst = -infinity;
    cfg.on_prox = [&](const Vector& in, const ProxResult& r, double tol) {
        ++prox_calls;
        worst = std::max(worst, oracle::prox_call_violation(in, r, tol));
    };
    auto r = solve(pb, cfg, Vector::Zero(10));
    EXPECT_TRUE(r.diagnostics.converged);
    EXPECT_EQ(static_cast<int>(r.diagnostics.history.size()), r.diagnostics.iterations);
    EXPECT_EQ(prox_calls, r.diagnostics.iterations);
    EXPECT_LE(worst, 0.0);
    EXPECT_GT(r.diagnostics.sigma, 0.0);
    EXPECT_NEAR(r.diagnostics.history[2].inner_tol, std::pow(3.0, -4.1), 1e-15);
}

TEST(SolverConfig, ScheduleValidation)
{
    SolverConfig cfg;
    cfg.alpha = 3.0;
    EXPECT_THROW(cfg.validate(), input_error);
    cfg.allow_weak_schedule = true;
    EXPECT_NO_THROW(cfg.validate());
    SolverConfig ista;
    ista.algorithm = Algorithm::ista;
    EXPECT_DOUBLE_EQ(ista.effective_alpha(), 2.1);
    ista.alpha = 2.0;
    EXPECT_THROW(ista.validate(), input_error);
}

TEST(Solve, InputErrors)
{
    std::mt19937_64 rng(40);
    auto pb = random_problem(rng, 10, 6, 3, 0.5);
    EXPECT_THROW(solve(pb, SolverConfig{}, Vector::Zero(5)), input_error);
    Vector bad = Vector::Zero(6);
    bad[0] = std::nan("");
    EXPECT_THROW(solve(pb, SolverConfig{}, bad), input_error);
    pb.tau = -1;
    EXPECT_THROW(solve(pb, SolverConfig{}, Vector::Zero(6)), input_error);
}

TEST(Solve, NonFiniteDataReported)
{
    std::mt19937_64 rng(41);
    auto pb = random_problem(rng, 10, 6, 3, 0.5);
    pb.response[0] = std::numeric_limits<double>::infinity();
    SolverConfig cfg;
    cfg.sigma_override = 1.0;
    try {
        solve(pb, cfg, Vector::Zero(6));
        FAIL();
    } catch (const numerical_error& e) {
        EXPECT_NE(std::string(e.what()).find("iteration 1"), std::string::npos);
    }
}

TEST(Solve, MaxOuterReturnsUnconverged)
{
    std::mt19937_64 rng(42);
    auto pb = random_problem(rng, 30, 10, 4, 0.2);
    SolverConfig cfg;
    cfg.max_outer = 3;
    cfg.outer_tol = 1e-14;
    auto r = solve(pb, cfg, Vector::Zero(10));
    EXPECT_FALSE(r.diagnostics.converged);
    EXPECT_EQ(r.diagnostics.iterations, 3);
    EXPECT_TRUE(r.solution.allFinite());
}

TEST(Solve, InfinityNormWithCyclicBackend)
{
    std::mt19937_64 rng(43);
    auto pb = random_problem(rng, 30, 10, 4, 0.5);
    pb.p = Exponent::infinity;
    pb.tau = 0.5 * tau_max(pb);
    SolverConfig cfg;
    cfg.prox.backend = Backend::cyclic;
    cfg.inner_tol_floor = 1e-5;
    cfg.outer_tol = 1e-6;
    cfg.prox.cyclic.max_iter = 10'000'000;
    auto a = solve(pb, cfg, Vector::Zero(10));
    SolverConfig rc;
    rc.outer_tol = 1e-10;
    auto b = solve_replicated(pb, rc, Vector::Zero(pb.groups.replicated_dim()));
    // full column rank design: the minimizer in x is unique
    EXPECT_LE((a.solution - b.solution).norm(), 1e-3 * std::max(1.0, b.solution.norm()));
}
