// gso: command-line driver for the latent group lasso solvers.
#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <gso/gso.hpp>
#include <gso/io.hpp>

namespace {

using namespace gso;
using json = nlohmann::json;
using clock_type = std::chrono::steady_clock;

constexpr int exit_ok = 0;
constexpr int exit_input = 2;
constexpr int exit_numerical = 3;

double seconds_since(clock_type::time_point t0)
{
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

/// GSO_SEED wins over --seed.
std::uint64_t resolve_seed(std::uint64_t flag)
{
    const char* env = std::getenv("GSO_SEED");
    if (env == nullptr || *env == '\0') return flag;
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(env, &used);
        if (used != std::string(env).size()) throw std::invalid_argument(env);
        return v;
    } catch (const std::exception&) {
        throw input_error(std::string("GSO_SEED: not a non-negative integer: '") + env + "'");
    }
}

json one_based(const std::vector<Index>& ids)
{
    json a = json::array();
    for (auto i : ids) a.push_back(i + 1);
    return a;
}

std::string join_one_based(const std::vector<Index>& ids)
{
    std::string s;
    for (std::size_t k = 0; k < ids.size(); ++k) {
        if (k > 0) s += ';';
        s += std::to_string(ids[k] + 1);
    }
    return s;
}

Backend pick_backend(const std::string& name, Exponent p)
{
    if (name == "auto") return p == Exponent::two ? Backend::dual_newton : Backend::cyclic;
    return parse_backend(name);
}

struct ProblemFlags
{
    std::string design;
    std::string response;
    std::string groups;
    std::string p = "2";
    bool header = false;
    bool partial = false;

    void add(CLI::App* cmd)
    {
        cmd->add_option("--design", design, "n x d design matrix (CSV, rows are samples)")->required();
        cmd->add_option("--response", response, "response vector (CSV, one value per line)")->required();
        cmd->add_option("--groups", groups, "group file (JSON, 1-based indices)")->required();
        cmd->add_option("--p", p, "penalty exponent: 2 or inf")->capture_default_str();
        cmd->add_flag("--header", header, "CSV inputs start with a header row");
        cmd->add_flag("--partial-coverage", partial, "allow coordinates outside every group (forced to zero)");
    }

    Problem load(double tau) const
    {
        const auto gs = io::read_groups(groups, partial ? Coverage::partial : Coverage::required);
        Problem pb{io::read_matrix_csv(design, header), io::read_vector_csv(response, header), tau, gs,
                   parse_exponent(p)};
        if (pb.design.rows() != pb.response.size()) {
            throw input_error(response + ": " + std::to_string(pb.response.size()) + " rows, but " + design +
                              " has " + std::to_string(pb.design.rows()));
        }
        if (pb.design.cols() != gs.dim()) {
            throw input_error(groups + ": d = " + std::to_string(gs.dim()) + ", but " + design + " has " +
                              std::to_string(pb.design.cols()) + " columns");
        }
        return pb;
    }

    json inputs() const { return {{"design", design}, {"response", response}, {"groups", groups}}; }
};

struct SolverFlags
{
    std::string algorithm = "fista";
    std::string backend = "auto";
    double eps0 = 1.0;
    std::optional<double> alpha;
    double outer_tol = 1e-6;
    int max_outer = 10000;
    double inner_tol_floor = 0.0;
    long cyclic_max_iter = 0;
    bool allow_weak_schedule = false;
    bool no_fallback = false;

    void add(CLI::App* cmd)
    {
        cmd->add_option("--algorithm", algorithm, "fista or ista")->capture_default_str();
        cmd->add_option("--backend", backend, "projection backend: auto, dual or cyclic")->capture_default_str();
        cmd->add_option("--eps0", eps0, "inner tolerance scale")->capture_default_str();
        cmd->add_option("--alpha", alpha, "inner tolerance decay (default 4.1 fista, 2.1 ista)");
        cmd->add_option("--outer-tol", outer_tol, "outer displacement tolerance")->capture_default_str();
        cmd->add_option("--max-outer", max_outer, "outer iteration budget")->capture_default_str();
        cmd->add_option("--inner-tol-floor", inner_tol_floor, "lower bound on the inner tolerance")
            ->capture_default_str();
        cmd->add_option("--cyclic-max-iter", cyclic_max_iter, "cyclic projection budget (0 = default)")
            ->capture_default_str();
        cmd->add_flag("--allow-weak-schedule", allow_weak_schedule, "accept alpha below the rate threshold");
        cmd->add_flag("--no-fallback", no_fallback, "fail instead of switching from dual Newton to cyclic");
    }

    SolverConfig config(Exponent p) const
    {
        SolverConfig c;
        c.algorithm = parse_algorithm(algorithm);
        c.eps0 = eps0;
        c.alpha = alpha;
        c.outer_tol = outer_tol;
        c.max_outer = max_outer;
        c.inner_tol_floor = inner_tol_floor;
        c.allow_weak_schedule = allow_weak_schedule;
        c.prox.backend = pick_backend(backend, p);
        c.prox.cyclic.max_iter = cyclic_max_iter;
        c.prox.allow_fallback = !no_fallback;
        c.validate();
        return c;
    }

    json to_json(const SolverConfig& c) const
    {
        return {{"algorithm", to_string(c.algorithm)},
                {"backend", to_string(c.prox.backend)},
                {"eps0", c.eps0},
                {"alpha", c.effective_alpha()},
                {"outer_tol", c.outer_tol},
                {"max_outer", c.max_outer},
                {"inner_tol_floor", c.inner_tol_floor},
                {"cyclic_max_iter", c.prox.cyclic.max_iter},
                {"fallback", c.prox.allow_fallback}};
    }
};

json diagnostics_json(const SolveDiagnostics& d)
{
    json hist = json::array();
    for (const auto& h : d.history) {
        hist.push_back({{"iteration", h.iteration},
                        {"active_groups", h.active_groups},
                        {"inner_iterations", h.inner_iterations},
                        {"inner_tol", h.inner_tol},
                        {"inner_residual", h.inner_residual},
                        {"displacement", h.displacement},
                        {"fell_back", h.fell_back}});
    }
    return {{"iterations", d.iterations},
            {"converged", d.converged},
            {"sigma", d.sigma},
            {"final_displacement", d.final_displacement},
            {"total_inner_iterations", d.total_inner_iterations},
            {"fallbacks", d.fallbacks},
            {"history", hist}};
}

// ---------------------------------------------------------------- solve

struct SolveCmd
{
    ProblemFlags problem;
    SolverFlags solver;
    double tau = 0;
    std::string out;

    void add(CLI::App& app)
    {
        auto* cmd = app.add_subcommand("solve", "solve one latent group lasso problem");
        problem.add(cmd);
        solver.add(cmd);
        cmd->add_option("--tau", tau, "regularization level")->required();
        cmd->add_option("--out", out, "solution CSV (a .json sidecar is written next to it)")->required();
        cmd->callback([this] { code = run(); });
    }

    int run()
    {
        const auto t0 = clock_type::now();
        const Problem pb = problem.load(tau);
        const SolverConfig cfg = solver.config(pb.p);
        const auto res = solve(pb, cfg, Vector::Zero(pb.features()));
        const auto supp = support(res.solution, 10.0 * cfg.outer_tol);
        io::write_vector_csv(out, res.solution);

        io::RunManifest m;
        m.command = "solve";
        m.inputs = problem.inputs();
        m.config = solver.to_json(cfg);
        m.config["tau"] = tau;
        m.config["p"] = to_string(pb.p);
        m.results = diagnostics_json(res.diagnostics);
        m.results["output"] = out;
        m.results["data_fit"] = data_fit(pb.design, pb.response, res.solution);
        m.results["support"] = one_based(supp);
        m.results["selected_groups"] = one_based(selected_groups(pb.groups, supp));
        m.wall_seconds = seconds_since(t0);
        m.write(io::sidecar_path(out));

        if (!res.diagnostics.converged) {
            std::cerr << "gso solve: no convergence after " << res.diagnostics.iterations
                      << " outer iterations (displacement " << res.diagnostics.final_displacement << ")\n";
            return exit_numerical;
        }
        return exit_ok;
    }

    int code = exit_ok;
};

// ----------------------------------------------------------------- path

struct PathCmd
{
    ProblemFlags problem;
    SolverFlags solver;
    std::optional<double> tau_min;
    std::optional<double> tau_max_flag;
    int tau_count = 0;
    bool auto_grid = false;
    int grid_count = 50;
    int prepass_count = 500;
    double prepass_ratio = 1e-4;
    double prepass_outer_tol = 1e-4;
    std::string mode = "projection";
    bool cold = false;
    std::string out;

    void add(CLI::App& app)
    {
        auto* cmd = app.add_subcommand("path", "regularization path over a descending tau grid");
        problem.add(cmd);
        solver.add(cmd);
        auto* lo = cmd->add_option("--tau-min", tau_min, "smallest tau of the geometric grid");
        cmd->add_option("--tau-max", tau_max_flag, "largest tau (default: the smallest tau with a zero solution)");
        auto* cnt = cmd->add_option("--tau-count", tau_count, "number of grid points");
        auto* ag = cmd->add_flag("--auto-grid", auto_grid, "pick tau_min with a loose pre-pass");
        ag->excludes(lo)->excludes(cnt);
        cmd->add_option("--grid-count", grid_count, "auto grid: number of points")->capture_default_str();
        cmd->add_option("--prepass-count", prepass_count, "auto grid: pre-pass points")->capture_default_str();
        cmd->add_option("--prepass-ratio", prepass_ratio, "auto grid: pre-pass spans [ratio*tau_max, tau_max]")
            ->capture_default_str();
        cmd->add_option("--prepass-outer-tol", prepass_outer_tol, "auto grid: pre-pass outer tolerance")
            ->capture_default_str();
        cmd->add_option("--mode", mode, "projection or replication")->capture_default_str();
        cmd->add_flag("--cold", cold, "disable warm starts");
        cmd->add_option("--out", out, "path CSV, one row per tau")->required();
        cmd->callback([this] { code = run(); });
    }

    int run()
    {
        const auto t0 = clock_type::now();
        const Problem pb = problem.load(1.0);
        const SolverConfig cfg = solver.config(pb.p);

        std::vector<double> taus;
        json grid;
        if (auto_grid) {
            AutoGridOptions go;
            go.count = grid_count;
            go.prepass_count = prepass_count;
            go.prepass_ratio = prepass_ratio;
            go.prepass_outer_tol = prepass_outer_tol;
            const auto g = auto_tau_grid(pb, cfg, go);
            taus = g.taus;
            grid = {{"auto", true}, {"tau_min", g.tau_min}, {"tau_max", g.tau_max}, {"count", go.count},
                    {"prepass_solves", g.prepass_solves}};
        } else {
            if (!tau_min || tau_count == 0) throw input_error("path: give --tau-min and --tau-count, or --auto-grid");
            const double hi = tau_max_flag.value_or(tau_max(pb));
            if (!(hi > 0)) throw input_error("path: tau_max is zero (response orthogonal to every group)");
            taus = tau_grid(*tau_min, hi, tau_count);
            grid = {{"auto", false}, {"tau_min", *tau_min}, {"tau_max", hi}, {"count", tau_count}};
        }

        PathOptions po;
        po.mode = parse_mode(mode);
        po.warm_start = !cold;
        po.warm_dual = !cold;
        const auto res = regularization_path(pb, taus, cfg, po);

        auto os = std::ofstream(out);
        if (!os) throw input_error(out + ": cannot open for writing");
        os << "tau,outer_iterations,seconds,converged,support_size,selected_groups,error";
        for (Index j = 0; j < pb.features(); ++j) os << ",x" << j + 1;
        os << '\n';
        for (const auto& e : res.entries) {
            std::string err = e.error;
            std::replace(err.begin(), err.end(), ',', ';');
            std::replace(err.begin(), err.end(), '\n', ' ');
            os << io::format_double(e.tau) << ',' << e.outer_iterations << ',' << io::format_double(e.seconds)
               << ',' << (e.converged ? 1 : 0) << ',' << e.support.size() << ',' << join_one_based(e.selected_groups)
               << ',' << err;
            for (Index j = 0; j < e.solution.size(); ++j) os << ',' << io::format_double(e.solution[j]);
            os << '\n';
        }
        os.close();

        io::RunManifest m;
        m.command = "path";
        m.inputs = problem.inputs();
        m.config = solver.to_json(cfg);
        m.config["p"] = to_string(pb.p);
        m.config["mode"] = to_string(po.mode);
        m.config["warm_start"] = !cold;
        m.config["grid"] = grid;
        m.results = {{"output", out},
                     {"sigma", res.sigma},
                     {"total_outer_iterations", res.total_outer_iterations()},
                     {"total_seconds", res.total_seconds()},
                     {"failures", res.failures()}};
        m.wall_seconds = seconds_since(t0);
        m.write(io::sidecar_path(out));

        if (res.failures() > 0) {
            std::cerr << "gso path: " << res.failures() << " of " << res.entries.size() << " solves failed\n";
            for (const auto& e : res.entries) {
                if (!e.error.empty()) std::cerr << "  tau " << e.tau << ": " << e.error << '\n';
            }
            return exit_numerical;
        }
        return exit_ok;
    }

    int code = exit_ok;
};

// ----------------------------------------------------------------- prox

struct ProxCmd
{
    std::string input;
    std::string groups;
    double lambda = 0;
    std::string p = "2";
    std::string backend = "auto";
    double tol = 1e-8;
    long cyclic_max_iter = 0;
    bool header = false;
    bool partial = false;
    std::string out;

    void add(CLI::App& app)
    {
        auto* cmd = app.add_subcommand("prox", "proximity operator of lambda * Omega");
        cmd->add_option("--input", input, "input vector (CSV, one value per line)")->required();
        cmd->add_option("--groups", groups, "group file (JSON, 1-based indices)")->required();
        cmd->add_option("--lambda", lambda, "prox scale")->required();
        cmd->add_option("--p", p, "penalty exponent: 2 or inf")->capture_default_str();
        cmd->add_option("--backend", backend, "auto, dual or cyclic")->capture_default_str();
        cmd->add_option("--tol", tol, "projection tolerance (Euclidean distance)")->capture_default_str();
        cmd->add_option("--cyclic-max-iter", cyclic_max_iter, "cyclic projection budget (0 = default)")
            ->capture_default_str();
        cmd->add_flag("--header", header, "input CSV starts with a header row");
        cmd->add_flag("--partial-coverage", partial, "allow coordinates outside every group");
        cmd->add_option("--out", out, "prox vector CSV")->required();
        cmd->callback([this] { code = run(); });
    }

    int run()
    {
        const auto t0 = clock_type::now();
        const auto gs = io::read_groups(groups, partial ? Coverage::partial : Coverage::required);
        const Vector x = io::read_vector_csv(input, header);
        if (x.size() != gs.dim()) {
            throw input_error(input + ": " + std::to_string(x.size()) + " values, but " + groups + " has d = " +
                              std::to_string(gs.dim()));
        }
        const Exponent e = parse_exponent(p);
        ProxOptions opts;
        opts.backend = pick_backend(backend, e);
        opts.cyclic.max_iter = cyclic_max_iter;
        const auto r = gso::prox(x, lambda, gs, e, opts, tol);
        io::write_vector_csv(out, r.prox_point);

        io::RunManifest m;
        m.command = "prox";
        m.inputs = {{"input", input}, {"groups", groups}};
        m.config = {{"lambda", lambda}, {"p", to_string(e)}, {"backend", to_string(opts.backend)}, {"tol", tol}};
        m.results = {{"output", out},
                     {"active_groups", one_based(r.active_set.members())},
                     {"backend_used", to_string(r.backend_used)},
                     {"backend_iterations", r.backend_iterations},
                     {"achieved_tolerance_estimate", r.achieved_tolerance_estimate},
                     {"fell_back", r.fell_back}};
        m.wall_seconds = seconds_since(t0);
        m.write(io::sidecar_path(out));
        return exit_ok;
    }

    int code = exit_ok;
};

// ---------------------------------------------------------------- bench

struct BenchCmd
{
    std::string scenario = "regression_overlap";
    Index d = 1000;
    Index db = 10;
    double alpha = 1.2;
    Index n = 0;
    int reps = 1;
    std::uint64_t seed = 0;
    int workers = 1;
    bool per_tau = false;
    std::vector<std::string> modes;
    int grid_count = 50;
    int prepass_count = 500;
    double rel_tol = 1e-3;
    SolverFlags solver;
    std::string out;

    void add(CLI::App& app)
    {
        auto* cmd = app.add_subcommand("bench", "projection vs replication benchmark on synthetic data");
        cmd->add_option("--scenario", scenario, "prox_bench, regression_no_overlap or regression_overlap")
            ->capture_default_str();
        cmd->add_option("--d", d, "dimension")->capture_default_str();
        cmd->add_option("--db", db, "group size")->capture_default_str();
        cmd->add_option("--alpha", alpha, "overlap factor (B = alpha d / dB)")->capture_default_str();
        cmd->add_option("--n", n, "samples (0 = scenario default)")->capture_default_str();
        cmd->add_option("--reps", reps, "repetitions (seeds seed .. seed+reps-1)")->capture_default_str();
        cmd->add_option("--seed", seed, "base seed (GSO_SEED overrides)")->capture_default_str();
        cmd->add_option("--workers", workers, "concurrent repetitions (timings are skewed above 1)")
            ->capture_default_str();
        cmd->add_flag("--per-tau", per_tau, "append per-tau rows for path scenarios");
        cmd->add_option("--modes", modes, "projection/replication, or cp2/dual/cpinf for prox_bench");
        cmd->add_option("--grid-count", grid_count, "auto grid points")->capture_default_str();
        cmd->add_option("--prepass-count", prepass_count, "auto grid pre-pass points")->capture_default_str();
        cmd->add_option("--rel-tol", rel_tol, "prox_bench: relative tolerance")->capture_default_str();
        cmd->add_option("--algorithm", solver.algorithm, "fista or ista")->capture_default_str();
        cmd->add_option("--outer-tol", solver.outer_tol, "outer displacement tolerance")->capture_default_str();
        cmd->add_option("--out", out, "CSV report (default: stdout)");
        cmd->callback([this] { code = run(); });
    }

    int run()
    {
        const auto t0 = clock_type::now();
        const std::uint64_t s = resolve_seed(seed);
        SyntheticSpec spec{parse_scenario(scenario), d, db, alpha, n};
        BenchOptions o;
        o.repetitions = reps;
        o.seed = s;
        o.workers = workers;
        o.grid.count = grid_count;
        o.grid.prepass_count = prepass_count;
        o.prox_rel_tol = rel_tol;
        o.solver = solver.config(Exponent::two);
        if (!modes.empty()) {
            if (spec.scenario == Scenario::prox_bench) {
                o.prox_modes = modes;
            } else {
                o.modes.clear();
                for (const auto& mm : modes) o.modes.push_back(parse_mode(mm));
            }
        }
        const auto rep = benchmark(spec, o);

        if (out.empty()) {
            write_bench_csv(std::cout, rep, per_tau);
        } else {
            std::ofstream os(out);
            if (!os) throw input_error(out + ": cannot open for writing");
            write_bench_csv(os, rep, per_tau);
        }

        json agg = json::array();
        int failures = 0;
        for (const auto& a : rep.aggregates) {
            failures += a.failures;
            agg.push_back({{"mode", a.mode},
                           {"runs", a.runs},
                           {"failures", a.failures},
                           {"mean_seconds", a.mean_seconds},
                           {"std_seconds", a.std_seconds},
                           {"mean_iters", a.mean_iters},
                           {"std_iters", a.std_iters}});
            std::cerr << a.mode << ": " << a.mean_seconds << " +- " << a.std_seconds << " s, " << a.mean_iters
                      << " +- " << a.std_iters << " iterations over " << a.runs << " runs";
            if (a.failures > 0) std::cerr << " (" << a.failures << " failed)";
            std::cerr << '\n';
        }
        if (!out.empty()) {
            io::RunManifest m;
            m.command = "bench";
            m.config = {{"scenario", to_string(spec.scenario)}, {"d", d},       {"dB", db},
                        {"alpha", alpha},                       {"n", n},       {"reps", reps},
                        {"workers", workers},                   {"rel_tol", rel_tol}};
            m.seed = s;
            m.has_seed = true;
            m.results = {{"output", out}, {"aggregates", agg}};
            m.wall_seconds = seconds_since(t0);
            m.write(io::sidecar_path(out));
        }
        return failures > 0 ? exit_numerical : exit_ok;
    }

    int code = exit_ok;
};

// ------------------------------------------------------------------ gen

struct GenCmd
{
    std::string scenario = "regression_overlap";
    Index d = 1000;
    Index db = 10;
    double alpha = 1.2;
    Index n = 0;
    std::uint64_t seed = 0;
    std::string out_dir;

    void add(CLI::App& app)
    {
        auto* cmd = app.add_subcommand("gen", "write a synthetic fixture");
        cmd->add_option("--scenario", scenario, "prox_bench, regression_no_overlap or regression_overlap")
            ->capture_default_str();
        cmd->add_option("--d", d, "dimension")->capture_default_str();
        cmd->add_option("--db", db, "group size")->capture_default_str();
        cmd->add_option("--alpha", alpha, "overlap factor (ignored without overlap)")->capture_default_str();
        cmd->add_option("--n", n, "samples (0 = scenario default)")->capture_default_str();
        cmd->add_option("--seed", seed, "seed (GSO_SEED overrides)")->capture_default_str();
        cmd->add_option("--out-dir", out_dir, "output directory")->required();
        cmd->callback([this] { code = run(); });
    }

    int run()
    {
        const auto t0 = clock_type::now();
        const std::uint64_t s = resolve_seed(seed);
        const Scenario sc = parse_scenario(scenario);
        std::filesystem::create_directories(out_dir);
        const auto file = [&](const std::string& name) { return (std::filesystem::path(out_dir) / name).string(); };

        io::RunManifest m;
        m.command = "gen";
        m.config = {{"scenario", to_string(sc)}, {"d", d}, {"dB", db}, {"alpha", alpha}, {"n", n}};
        m.seed = s;
        m.has_seed = true;
        if (sc == Scenario::prox_bench) {
            const auto inst = gen_prox_bench(SyntheticSpec{sc, d, db, alpha, n}, s);
            io::write_vector_csv(file("x.csv"), inst.x);
            io::write_groups(file("groups.json"), inst.groups);
            m.results = {{"x", file("x.csv")},
                         {"groups", file("groups.json")},
                         {"tau2", inst.tau2},
                         {"tau_inf", inst.tau_inf}};
        } else {
            RegressionData data;
            if (sc == Scenario::regression_no_overlap) {
                if (db < 1 || d % db != 0) throw input_error("gen: dB must divide d without overlap");
                data = gen_regression_no_overlap(d, d / db, n > 0 ? n : 10 * std::min<Index>(30, d), s);
            } else {
                data = gen_regression_overlap(d, db, alpha, s, n);
            }
            io::write_matrix_csv(file("design.csv"), data.design);
            io::write_vector_csv(file("response.csv"), data.response);
            io::write_vector_csv(file("weights.csv"), data.weights);
            io::write_groups(file("groups.json"), data.groups);
            Problem pb{data.design, data.response, 1.0, data.groups, Exponent::two};
            m.results = {{"design", file("design.csv")},
                         {"response", file("response.csv")},
                         {"weights", file("weights.csv")},
                         {"groups", file("groups.json")},
                         {"samples", data.design.rows()},
                         {"true_groups", one_based(data.true_groups)},
                         {"true_support", one_based(data.true_support)},
                         {"tau_max", tau_max(pb)}};
        }
        m.wall_seconds = seconds_since(t0);
        m.write(file("manifest.json"));
        return exit_ok;
    }

    int code = exit_ok;
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"gso: latent group lasso with projection-based proximal steps"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(gso::io::version));

    SolveCmd solve_cmd;
    PathCmd path_cmd;
    ProxCmd prox_cmd;
    BenchCmd bench_cmd;
    GenCmd gen_cmd;
    solve_cmd.add(app);
    path_cmd.add(app);
    prox_cmd.add(app);
    bench_cmd.add(app);
    gen_cmd.add(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_input;
    } catch (const gso::input_error& e) {
        std::cerr << "gso: input error: " << e.what() << '\n';
        return exit_input;
    } catch (const gso::convergence_error& e) {
        std::cerr << "gso: convergence error: " << e.what() << " (residual " << e.residual() << " after "
                  << e.iterations() << " iterations)\n";
        return exit_numerical;
    } catch (const gso::numerical_error& e) {
        std::cerr << "gso: numerical error: " << e.what() << '\n';
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "gso: " << e.what() << '\n';
        return 1;
    }

    for (int c : {solve_cmd.code, path_cmd.code, prox_cmd.code, bench_cmd.code, gen_cmd.code}) {
        if (c != exit_ok) return c;
    }
    return exit_ok;
}
