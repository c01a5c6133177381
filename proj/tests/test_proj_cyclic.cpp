#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace gso;

TEST(CylinderP2, RadialScaling)
{
    Vector w(3);
    w << 3, 4, 7;
    Vector out = project_cylinder_p2(w, std::vector<Index>{0, 1}, 1.0);
    EXPECT_NEAR(out[0], 0.6, 1e-15);
    EXPECT_NEAR(out[1], 0.8, 1e-15);
    EXPECT_EQ(out[2], 7.0);
}

TEST(CylinderP2, InsideAndZeroUnchanged)
{
    Vector w(3);
    w << 0.3, 0.4, 7;
    EXPECT_EQ(project_cylinder_p2(w, std::vector<Index>{0, 1}, 1.0), w);
    EXPECT_EQ(project_cylinder_p2(Vector::Zero(3), std::vector<Index>{0, 1}, 1.0), Vector::Zero(3));
}

TEST(CylinderP2, MatchesConstrainedLeastSquaresOracle)
{
    // Projection onto a ball: minimizer of ||v - w||^2 over ||v|| <= r satisfies
    // v = w / (1 + mu) with mu = ||w|| / r - 1; check the optimality directly.
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        Vector w = oracle::random_normal(5, rng, 3.0);
        std::vector<Index> g{0, 2, 4};
        Vector p = project_cylinder_p2(w, g, 1.0);
        Vector sub(3), psub(3);
        for (int i = 0; i < 3; ++i) {
            sub[i] = w[g[i]];
            psub[i] = p[g[i]];
        }
        if (sub.norm() > 1.0) {
            EXPECT_NEAR(psub.norm(), 1.0, 1e-12);
            // w - p parallel to p with nonnegative multiplier
            EXPECT_NEAR((sub - psub).normalized().dot(psub.normalized()), 1.0, 1e-12);
        }
    }
}

TEST(L1Ball, WorkedExamples)
{
    Vector a(2);
    a << 3, 1;
    EXPECT_TRUE(project_l1_ball(a, 2.0).isApprox((Vector(2) << 2, 0).finished(), 1e-15));
    Vector b(2);
    b << 1, -1;
    EXPECT_EQ(project_l1_ball(b, 3.0), b);
    Vector c(2);
    c << 2, 2;
    EXPECT_TRUE(project_l1_ball(c, 2.0).isApprox((Vector(2) << 1, 1).finished(), 1e-15));
}

TEST(L1Ball, OracleAndInvariants)
{
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> len(1, 50);
    std::uniform_real_distribution<double> rad(0.05, 10.0);
    for (int t = 0; t < 200; ++t) {
        Vector w = oracle::random_normal(len(rng), rng, 2.0);
        const double r = rad(rng);
        Vector p = project_l1_ball(w, r);
        EXPECT_LE((p - oracle::l1_projection_bisection(w, r)).norm(), 1e-10);
        EXPECT_NEAR(p.lpNorm<1>(), std::min(w.lpNorm<1>(), r), 1e-10);
        EXPECT_LE(oracle::l1_variational_residual(w, p, r), 1e-10);
        for (Index j = 0; j < w.size(); ++j) {
            EXPECT_LE(std::abs(p[j]), std::abs(w[j]));
            EXPECT_GE(p[j] * w[j], 0.0);
        }
    }
}

TEST(L1Ball, TiesAndZeros)
{
    Vector w(4);
    w << 1, 1, 1, 0;
    Vector p = project_l1_ball(w, 1.5);
    EXPECT_NEAR(p[0], 0.5, 1e-15);
    EXPECT_NEAR(p[2], 0.5, 1e-15);
    EXPECT_EQ(p[3], 0.0);
}

TEST(Cyclic, PointInsideIsFixed)
{
    GroupStructure gs(3, {{0, 1}, {1, 2}});
    ActiveSet all(gs, {0, 1});
    Vector x(3);
    x << 0.1, 0.2, 0.3;
    auto r = cyclic_project(x, all, 1.0, Exponent::two, 1e-8);
    EXPECT_LE((r.point - x).norm(), 1e-14);
}

TEST(Cyclic, SingleSetMatchesClosedForm)
{
    GroupStructure gs(3, {{0, 1}, {2}});
    ActiveSet one(gs, {0});
    Vector x(3);
    x << 3, 4, 7;
    const double tol = 1e-4;
    auto r = cyclic_project(x, one, 1.0, Exponent::two, tol);
    EXPECT_LE((r.point - project_cylinder_p2(x, gs.group(0), 1.0)).norm(), tol);
}

TEST(Cyclic, TwoCylindersMatchDualNewton)
{
    GroupStructure gs(3, {{0, 1}, {1, 2}});
    ActiveSet all(gs, {0, 1});
    Vector x(3);
    x << 2, 2, 2;
    const double tol = 1e-5;
    CyclicOptions opts;
    opts.max_iter = 10'000'000;
    auto c = cyclic_project(x, all, 1.0, Exponent::two, tol, opts);
    auto n = projected_newton(x, 1.0, all, Vector::Zero(2), 1e-10);
    EXPECT_LE((c.point - n.projection).norm(), tol + 1e-10);
}

TEST(Cyclic, ViolationShrinksWithBudget)
{
    std::mt19937_64 rng(21);
    auto gs = oracle::random_groups(10, 4, rng);
    Vector x = oracle::random_normal(10, rng, 3.0);
    auto active = active_groups(x, 1.0, gs, 2.0);
    ASSERT_FALSE(active.empty());
    double last = infinity;
    for (long budget : {40L, 400L, 4000L, 40000L}) {
        CyclicOptions opts;
        opts.max_iter = budget;
        double viol = 0;
        try {
            viol = cyclic_project(x, active, 1.0, Exponent::two, 1e-12, opts).violation;
        } catch (const convergence_error& e) {
            viol = e.residual();
        }
        EXPECT_LE(viol, last * 1.0001);
        last = viol;
    }
}

TEST(Cyclic, BudgetExhaustionReportsResidual)
{
    GroupStructure gs(3, {{0, 1}, {1, 2}});
    ActiveSet all(gs, {0, 1});
    Vector x(3);
    x << 5, 5, 5;
    CyclicOptions opts;
    opts.max_iter = 10;
    try {
        cyclic_project(x, all, 1.0, Exponent::two, 1e-12, opts);
        FAIL();
    } catch (const convergence_error& e) {
        EXPECT_GT(e.residual(), 0.0);
        EXPECT_GE(e.iterations(), 10);
    }
}

TEST(Cyclic, LInfinityUsesL1Projector)
{
    GroupStructure gs(2, {{0, 1}});
    ActiveSet all(gs, {0});
    Vector x(2);
    x << 3, 1;
    CyclicOptions opts;
    opts.max_iter = 10'000'000;
    auto r = cyclic_project(x, all, 2.0, Exponent::infinity, 1e-6, opts);
    EXPECT_LE((r.point - (Vector(2) << 2, 0).finished()).norm(), 1e-6);
}

TEST(Cyclic, CustomProjector)
{
    GroupStructure gs(2, {{0, 1}});
    ActiveSet all(gs, {0});
    Vector x(2);
    x << 3, 4;
    int calls = 0;
    SetProjector proj = [&](std::span<double> b, double r) {
        ++calls;
        L2BallProjector{}(b, r);
    };
    auto res = cyclic_project(x, all, 1.0, 2.0, proj, 1e-5);
    EXPECT_GT(calls, 0);
    EXPECT_LE((res.point - (Vector(2) << 0.6, 0.8).finished()).norm(), 1e-5);
}

TEST(Cyclic, DefaultBudget)
{
    EXPECT_EQ(default_cyclic_budget(3, 0.1), 3000);
    EXPECT_EQ(default_cyclic_budget(100, 1e-6), 1000000);
}
