#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <gso/group_model.hpp>

namespace gso {

enum class Scenario { prox_bench, regression_no_overlap, regression_overlap };

inline std::string to_string(Scenario s)
{
    switch (s) {
    case Scenario::prox_bench: return "prox_bench";
    case Scenario::regression_no_overlap: return "regression_no_overlap";
    case Scenario::regression_overlap: return "regression_overlap";
    }
    return "?";
}

inline Scenario parse_scenario(const std::string& s)
{
    if (s == "prox_bench") return Scenario::prox_bench;
    if (s == "regression_no_overlap" || s == "no_overlap") return Scenario::regression_no_overlap;
    if (s == "regression_overlap" || s == "overlap") return Scenario::regression_overlap;
    throw input_error("unknown scenario '" + s +
                      "' (expected prox_bench, regression_no_overlap or regression_overlap)");
}

struct SyntheticSpec
{
    Scenario scenario = Scenario::regression_overlap;
    Index d = 1000;
    Index dB = 10;     ///< group size
    double alpha = 1.2; ///< overlap factor, B = alpha d / dB
    Index n = 0;       ///< samples; 0 picks the scenario default
};

/// B = alpha * d / dB, rejected unless integral.
inline Index num_groups_for(Index d, Index dB, double alpha)
{
    if (d < 1 || dB < 1) throw input_error("synthetic: d and dB must be >= 1");
    if (dB > d) throw input_error("synthetic: dB exceeds d");
    if (!(alpha > 0)) throw input_error("synthetic: alpha must be > 0");
    const double b = alpha * static_cast<double>(d) / static_cast<double>(dB);
    const double rb = std::round(b);
    if (std::abs(b - rb) > 1e-9 * std::max(1.0, b) || rb < 1) {
        throw input_error("synthetic: B = alpha*d/dB = " + std::to_string(b) + " is not a positive integer");
    }
    return static_cast<Index>(rb);
}

namespace detail {

/// dB distinct indices drawn uniformly from {0..d-1}.
inline std::vector<Index> draw_group(Index d, Index dB, std::mt19937_64& rng)
{
    std::vector<Index> pool(d);
    std::iota(pool.begin(), pool.end(), Index{0});
    for (Index i = 0; i < dB; ++i) {
        std::uniform_int_distribution<Index> pick(i, d - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(dB);
    std::sort(pool.begin(), pool.end());
    return pool;
}

} // namespace detail

struct ProxBenchInstance
{
    Vector x;
    GroupStructure groups;
    double tau2 = 0;   ///< 0.8 min_r ||x||_{G_r,2}
    double tau_inf = 0; ///< 0.8 min_r ||x||_{G_r,inf}
};

/// Random groups and a standard normal point, with levels at which every group is active.
inline ProxBenchInstance gen_prox_bench(const SyntheticSpec& spec, std::uint64_t seed)
{
    if (spec.scenario != Scenario::prox_bench) throw input_error("gen_prox_bench: wrong scenario");
    const Index b = num_groups_for(spec.d, spec.dB, spec.alpha);
    std::mt19937_64 rng(seed);
    std::vector<std::vector<Index>> groups;
    groups.reserve(b);
    for (Index r = 0; r < b; ++r) groups.push_back(detail::draw_group(spec.d, spec.dB, rng));

    ProxBenchInstance inst;
    std::normal_distribution<double> normal;
    inst.x.resize(spec.d);
    for (Index j = 0; j < spec.d; ++j) inst.x[j] = normal(rng);
    inst.groups = GroupStructure(spec.d, std::move(groups), Coverage::partial);

    double min2 = infinity, mininf = infinity;
    for (Index r = 0; r < b; ++r) {
        min2 = std::min(min2, detail::group_norm_unchecked(inst.x, inst.groups.group(r), 2.0));
        mininf = std::min(mininf, detail::group_norm_unchecked(inst.x, inst.groups.group(r), infinity));
    }
    inst.tau2 = 0.8 * min2;
    inst.tau_inf = 0.8 * mininf;
    return inst;
}

struct RegressionData
{
    Matrix design;  ///< n x d, entries uniform on [-1, 1]
    Vector response;
    GroupStructure groups;
    Vector weights;                  ///< true coefficients
    std::vector<Index> true_groups;  ///< 0-based ids of the relevant groups
    std::vector<Index> true_support; ///< 0-based relevant coordinates
};

namespace detail {

inline void fill_regression(RegressionData& out, Index n, Index d, Index relevant, double c,
                            std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::normal_distribution<double> normal;
    out.design.resize(n, d);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < d; ++j) out.design(i, j) = unif(rng);
    }
    out.weights = Vector::Zero(d);
    out.weights.head(relevant).setConstant(c);
    out.response = out.design * out.weights;
    for (Index i = 0; i < n; ++i) out.response[i] += normal(rng);
    out.true_support.resize(relevant);
    std::iota(out.true_support.begin(), out.true_support.end(), Index{0});
}

} // namespace detail

/// Signal scale giving std(signal)/std(noise) = 5 for `relevant` U[-1,1] inputs with equal weights.
inline double snr5_scale(Index relevant)
{
    return std::sqrt(25.0 * 3.0 / static_cast<double>(relevant));
}

/**
 * Sequential non-overlapping groups of size d/B; the signal lives on the first
 * 30 coordinates (all of them when d < 30).
 */
inline RegressionData gen_regression_no_overlap(Index d, Index b, Index n, std::uint64_t seed)
{
    if (d < 1 || b < 1 || n < 1) throw input_error("gen_regression_no_overlap: d, B, n must be >= 1");
    if (d % b != 0) throw input_error("gen_regression_no_overlap: B must divide d");
    const Index size = d / b;
    const Index relevant = std::min<Index>(30, d);

    RegressionData out;
    std::vector<std::vector<Index>> groups(b);
    for (Index r = 0; r < b; ++r) {
        groups[r].resize(size);
        std::iota(groups[r].begin(), groups[r].end(), r * size);
    }
    out.groups = GroupStructure(d, std::move(groups));
    for (Index r = 0; r < b && r * size < relevant; ++r) out.true_groups.push_back(r);

    std::mt19937_64 rng(seed);
    detail::fill_regression(out, n, d, relevant, snr5_scale(relevant), rng);
    return out;
}

/**
 * Three relevant groups with 20% pairwise overlap on the first 12 dB/5
 * coordinates, followed by B-3 random groups of size dB. n defaults to ten
 * times the number of relevant coordinates.
 */
inline RegressionData gen_regression_overlap(Index d, Index dB, double alpha, std::uint64_t seed,
                                             Index n = 0)
{
    if (dB < 5 || dB % 5 != 0) throw input_error("gen_regression_overlap: dB must be a positive multiple of 5");
    const Index relevant = 12 * dB / 5;
    if (d < relevant) throw input_error("gen_regression_overlap: d must be >= 12*dB/5");
    const Index b = num_groups_for(d, dB, alpha);
    if (b < 3) throw input_error("gen_regression_overlap: need at least 3 groups");
    if (n == 0) n = 10 * relevant;

    std::vector<std::vector<Index>> groups;
    groups.reserve(b);
    const Index f = dB / 5;
    std::vector<Index> g1(dB), g2(dB), g3;
    std::iota(g1.begin(), g1.end(), Index{0});
    std::iota(g2.begin(), g2.end(), 4 * f);
    for (Index j = 0; j < f; ++j) g3.push_back(j);
    for (Index j = 8 * f; j < 12 * f; ++j) g3.push_back(j);
    groups.push_back(std::move(g1));
    groups.push_back(std::move(g2));
    groups.push_back(std::move(g3));

    std::mt19937_64 rng(seed);
    for (Index r = 3; r < b; ++r) groups.push_back(detail::draw_group(d, dB, rng));

    RegressionData out;
    out.groups = GroupStructure(d, std::move(groups), Coverage::partial);
    out.true_groups = {0, 1, 2};
    detail::fill_regression(out, n, d, relevant, snr5_scale(relevant), rng);
    return out;
}

} // namespace gso
