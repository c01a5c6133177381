#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include <gso/io.hpp>

#include "oracles.hpp"

using namespace gso;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct CliRun
{
    int code = -1;
    std::string err;
};

class Cli : public ::testing::Test
{
protected:
    fs::path dir;

    void SetUp() override
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir = fs::temp_directory_path() / ("gso_cli_" + std::to_string(::getpid()) + "_" + info->name());
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string file(const std::string& name) const { return (dir / name).string(); }

    CliRun run(const std::string& args, const std::string& env = "") const
    {
        const std::string errf = file("stderr.txt");
        const std::string cmd = env + (env.empty() ? "" : " ") + std::string(GSO_CLI_PATH) + " " + args + " > " +
                                file("stdout.txt") + " 2> " + errf;
        const int status = std::system(cmd.c_str());
        CliRun r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        std::ifstream in(errf);
        std::stringstream ss;
        ss << in.rdbuf();
        r.err = ss.str();
        return r;
    }

    std::string stdout_text() const
    {
        std::ifstream in(file("stdout.txt"));
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    static json read_json(const std::string& path)
    {
        std::ifstream in(path);
        return json::parse(in);
    }

    static std::vector<std::string> lines(const std::string& path)
    {
        std::ifstream in(path);
        std::vector<std::string> out;
        for (std::string l; std::getline(in, l);) {
            if (!l.empty()) out.push_back(l);
        }
        return out;
    }

    void write_problem(const Matrix& a, const Vector& y, const GroupStructure& gs)
    {
        io::write_matrix_csv(file("a.csv"), a);
        io::write_vector_csv(file("y.csv"), y);
        io::write_groups(file("g.json"), gs);
    }

    std::string problem_args() const
    {
        return "--design " + file("a.csv") + " --response " + file("y.csv") + " --groups " + file("g.json");
    }
};

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string f; std::getline(ss, f, sep);) out.push_back(f);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

} // namespace

TEST_F(Cli, SolveZeroResponseGivesZeroSolution)
{
    std::mt19937_64 rng(70);
    write_problem(oracle::random_matrix(20, 6, rng), Vector::Zero(20), GroupStructure(6, {{0, 1, 2}, {2, 3, 4, 5}}));
    auto r = run("solve " + problem_args() + " --tau 0.1 --out " + file("x.csv"));
    ASSERT_EQ(r.code, 0) << r.err;
    Vector x = io::read_vector_csv(file("x.csv"));
    EXPECT_EQ(x, Vector::Zero(6));
    auto side = read_json(file("x.json"));
    EXPECT_EQ(side["command"], "solve");
    EXPECT_TRUE(side["results"]["converged"].get<bool>());
    EXPECT_TRUE(side["results"].contains("history"));
    EXPECT_EQ(side["config"]["backend"], "dual");
}

TEST_F(Cli, SolveRecoversRelevantGroupsOnOverlapToy)
{
    auto data = gen_regression_overlap(100, 10, 1.2, 3);
    write_problem(data.design, data.response, data.groups);
    Problem pb{data.design, data.response, 1.0, data.groups, Exponent::two};
    SolverConfig cfg;
    auto grid = auto_tau_grid(pb, cfg);
    auto path = regularization_path(pb, grid.taus, cfg);
    std::vector<double> hits;
    for (const auto& e : path.entries) {
        if (e.support == data.true_support) hits.push_back(e.tau);
    }
    ASSERT_FALSE(hits.empty()) << "fixture seed does not recover the support";
    const double tau = hits[hits.size() / 2];

    std::ostringstream cmd;
    cmd << "solve " << problem_args() << " --tau " << io::format_double(tau) << " --out " << file("x.csv");
    auto r = run(cmd.str());
    ASSERT_EQ(r.code, 0) << r.err;
    auto side = read_json(file("x.json"));
    std::vector<Index> supp;
    for (auto& j : side["results"]["support"]) supp.push_back(j.get<Index>() - 1);
    EXPECT_EQ(supp, data.true_support);
    EXPECT_EQ(side["results"]["selected_groups"], json({1, 2, 3}));
}

TEST_F(Cli, MissingGroupFileExitsTwoNamingPath)
{
    std::mt19937_64 rng(71);
    write_problem(oracle::random_matrix(5, 2, rng), oracle::random_normal(5, rng), GroupStructure(2, {{0, 1}}));
    auto r = run("solve --design " + file("a.csv") + " --response " + file("y.csv") + " --groups " +
                 file("nope.json") + " --tau 1 --out " + file("x.csv"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find(file("nope.json")), std::string::npos) << r.err;
}

TEST_F(Cli, MalformedInputsExitTwo)
{
    std::ofstream(file("a.csv")) << "1,2\n3,oops\n";
    io::write_vector_csv(file("y.csv"), Vector::Ones(2));
    io::write_groups(file("g.json"), GroupStructure(2, {{0, 1}}));
    auto r = run("solve " + problem_args() + " --tau 1 --out " + file("x.csv"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("a.csv"), std::string::npos);
    EXPECT_NE(r.err.find("row 2"), std::string::npos);

    std::mt19937_64 rng(72);
    write_problem(oracle::random_matrix(4, 3, rng), oracle::random_normal(5, rng), GroupStructure(3, {{0, 1, 2}}));
    EXPECT_EQ(run("solve " + problem_args() + " --tau 1 --out " + file("x.csv")).code, 2);
    EXPECT_EQ(run("solve " + problem_args() + " --out " + file("x.csv")).code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("solve " + problem_args() + " --tau 1 --alpha 3 --out " + file("x.csv")).code, 2);
}

TEST_F(Cli, ConvergenceFailureExitsThree)
{
    std::mt19937_64 rng(73);
    auto gs = oracle::random_groups(8, 3, rng);
    write_problem(oracle::random_matrix(30, 8, rng), oracle::random_normal(30, rng), gs);
    auto r = run("solve " + problem_args() + " --tau 0.01 --max-outer 2 --outer-tol 1e-14 --out " + file("x.csv"));
    EXPECT_EQ(r.code, 3);
    EXPECT_TRUE(fs::exists(file("x.json")));
}

TEST_F(Cli, PathRowsDescendingAndFirstEmpty)
{
    std::mt19937_64 rng(74);
    auto gs = oracle::random_groups(8, 3, rng);
    write_problem(oracle::random_matrix(30, 8, rng), oracle::random_normal(30, rng), gs);
    Problem pb{io::read_matrix_csv(file("a.csv")), io::read_vector_csv(file("y.csv")), 1.0, gs, Exponent::two};
    std::ostringstream cmd;
    cmd << "path " << problem_args() << " --tau-min " << io::format_double(0.1 * tau_max(pb))
        << " --tau-count 3 --out " << file("p.csv");
    auto r = run(cmd.str());
    ASSERT_EQ(r.code, 0) << r.err;
    auto rows = lines(file("p.csv"));
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].substr(0, 4), "tau,");
    double last = infinity;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        auto f = split(rows[k], ',');
        ASSERT_EQ(f.size(), 7u + 8u);
        const double tau = std::stod(f[0]);
        EXPECT_LT(tau, last);
        last = tau;
        if (k == 1) EXPECT_EQ(f[4], "0");
    }
    EXPECT_TRUE(fs::exists(file("p.json")));
    EXPECT_EQ(run("path " + problem_args() + " --tau-count 3 --out " + file("q.csv")).code, 2);
}

TEST_F(Cli, PathAutoGrid)
{
    auto data = gen_regression_overlap(50, 10, 1.2, 1);
    write_problem(data.design, data.response, data.groups);
    auto r = run("path " + problem_args() + " --auto-grid --grid-count 6 --prepass-count 40 --out " + file("p.csv"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(lines(file("p.csv")).size(), 7u);
    EXPECT_TRUE(read_json(file("p.json"))["config"]["grid"]["auto"].get<bool>());
}

TEST_F(Cli, ProxCases)
{
    GroupStructure gs(3, {{0, 1}, {1, 2}});
    io::write_groups(file("g.json"), gs);
    Vector x(3);
    x << 1.5, -2, 1;
    io::write_vector_csv(file("x.csv"), x);

    auto r = run("prox --input " + file("x.csv") + " --groups " + file("g.json") + " --lambda 10 --out " +
                 file("z.csv"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(io::read_vector_csv(file("z.csv")), Vector::Zero(3));

    const double tol = 1e-5;
    const std::string base = "prox --input " + file("x.csv") + " --groups " + file("g.json") + " --lambda 0.5 --tol 1e-5";
    ASSERT_EQ(run(base + " --backend dual --out " + file("d.csv")).code, 0);
    ASSERT_EQ(run(base + " --backend cyclic --out " + file("c.csv")).code, 0);
    EXPECT_LE((io::read_vector_csv(file("d.csv")) - io::read_vector_csv(file("c.csv"))).norm(), 2 * tol);

    GroupStructure one(2, {{0, 1}});
    io::write_groups(file("one.json"), one);
    Vector w(2);
    w << 3, 1;
    io::write_vector_csv(file("w.csv"), w);
    r = run("prox --input " + file("w.csv") + " --groups " + file("one.json") +
            " --lambda 2 --p inf --tol 1e-5 --out " + file("inf.csv"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_LE((io::read_vector_csv(file("inf.csv")) - (Vector(2) << 1, 1).finished()).norm(), 1e-5);
    EXPECT_EQ(read_json(file("inf.json"))["results"]["backend_used"], "cyclic");
    EXPECT_EQ(run("prox --input " + file("w.csv") + " --groups " + file("one.json") +
                  " --lambda 2 --p inf --backend dual --out " + file("bad.csv"))
                  .code,
              2);
}

TEST_F(Cli, BenchRowsAndDeterminism)
{
    const std::string args = "bench --scenario regression_overlap --d 100 --db 10 --alpha 1.2 --reps 1 "
                             "--grid-count 5 --prepass-count 30 --seed 4 --out ";
    ASSERT_EQ(run(args + file("a.csv")).code, 0);
    ASSERT_EQ(run(args + file("b.csv")).code, 0);
    auto a = lines(file("a.csv"));
    auto b = lines(file("b.csv"));
    ASSERT_EQ(a.size(), 3u);
    ASSERT_EQ(b.size(), 3u);
    for (std::size_t k = 1; k < a.size(); ++k) {
        auto fa = split(a[k], ',');
        auto fb = split(b[k], ',');
        ASSERT_EQ(fa.size(), 10u);
        fa[6] = fb[6] = "";
        EXPECT_EQ(fa, fb);
    }
    EXPECT_EQ(split(a[1], ',')[4], "projection");
    EXPECT_EQ(split(a[2], ',')[4], "replication");
    EXPECT_TRUE(fs::exists(file("a.json")));
}

TEST_F(Cli, BenchProxScenarioComparesBackends)
{
    auto r = run("bench --scenario prox_bench --d 100 --db 10 --alpha 2 --reps 1 --seed 1");
    ASSERT_EQ(r.code, 0) << r.err;
    auto out = split(stdout_text(), '\n');
    ASSERT_GE(out.size(), 4u);
    EXPECT_EQ(split(out[1], ',')[4], "cp2");
    EXPECT_EQ(split(out[2], ',')[4], "dual");
    EXPECT_EQ(split(out[3], ',')[4], "cpinf");
}

TEST_F(Cli, GenAndSeedOverride)
{
    ASSERT_EQ(run("gen --scenario regression_overlap --d 50 --db 10 --alpha 1.2 --seed 2 --out-dir " + file("s2")).code,
              0);
    ASSERT_EQ(run("gen --scenario regression_overlap --d 50 --db 10 --alpha 1.2 --seed 1 --out-dir " + file("env"),
                  "GSO_SEED=2")
                  .code,
              0);
    EXPECT_EQ(io::read_vector_csv(file("s2/response.csv")), io::read_vector_csv(file("env/response.csv")));
    auto m = read_json(file("env/manifest.json"));
    EXPECT_EQ(m["seed"], 2);
    EXPECT_EQ(m["results"]["true_groups"], json({1, 2, 3}));
    auto gs = io::read_groups(file("s2/groups.json"));
    EXPECT_EQ(gs.num_groups(), 6);

    ASSERT_EQ(run("gen --scenario prox_bench --d 100 --db 10 --alpha 2 --out-dir " + file("pb")).code, 0);
    EXPECT_EQ(io::read_vector_csv(file("pb/x.csv")).size(), 100);
    EXPECT_EQ(run("gen --scenario prox_bench --d 100 --db 7 --alpha 2 --out-dir " + file("bad")).code, 2);
    EXPECT_EQ(run("gen --d 50 --out-dir " + file("x"), "GSO_SEED=abc").code, 2);
}
