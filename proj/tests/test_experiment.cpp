#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "matfun/experiment.hpp"

using namespace matfun;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("matfun_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::string> lines(const std::string& s)
{
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

int run_cli(const std::string& args, const fs::path& dir, const std::string& env = "")
{
    const std::string cmd = env + " \"" MATFUN_CLI "\" " + args + " >\"" + (dir / "stdout.txt").string() + "\" 2>\"" +
                            (dir / "stderr.txt").string() + "\"";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

ExperimentConfig small_config()
{
    ExperimentConfig cfg;
    cfg.n = 20;
    cfg.target_cond = 40.0;
    cfg.seed = 3;
    return cfg;
}

TEST(Experiment, CsvRowsAndMonotoneTail)
{
    const auto dir = scratch("rows");
    ExperimentConfig cfg = small_config();
    cfg.output_dir = dir.string();
    const RunSummary run = run_experiment(cfg);
    ASSERT_TRUE(run.all_converged());
    for (const auto& s : run.schemes) {
        const auto rows = lines(slurp(dir / (std::string(scheme_name(s.scheme)) + ".csv")));
        ASSERT_FALSE(rows.empty());
        EXPECT_EQ(rows.front(), "k,R,S,group_residual,T");
        EXPECT_EQ(rows.size() - 1, std::size_t(s.iterations_to_tol + 1)) << scheme_name(s.scheme);
        const auto& st = s.steps;
        const std::size_t m = st.size();
        for (std::size_t k = m >= 3 ? m - 2 : 1; k < m; ++k) EXPECT_LT(st[k].r, st[k - 1].r) << scheme_name(s.scheme);
        EXPECT_LT(s.final_r, cfg.tol);
        EXPECT_LT(s.final_s, cfg.tol);
    }
    EXPECT_TRUE(fs::exists(dir / "summary.txt"));
}

TEST(Experiment, OrdersInBands)
{
    ExperimentConfig cfg = small_config();
    const RunSummary run = run_experiment(cfg);
    for (const auto& s : run.schemes) {
        ASSERT_TRUE(s.order.has_value()) << scheme_name(s.scheme);
        const double p = *s.order;
        switch (s.scheme) {
        case Scheme::newton: EXPECT_TRUE(p >= 1.7 && p <= 2.3) << p; break;
        case Scheme::pade1: EXPECT_TRUE(p >= 2.6 && p <= 3.4) << p; break;
        case Scheme::pade2: EXPECT_TRUE(p >= 4.3 && p <= 5.7) << p; break;
        }
    }
}

TEST(Experiment, IdentityInputIsFixedPoint)
{
    ExperimentConfig cfg;
    cfg.schemes = {Scheme::pade2};
    cfg.a_override = Matrix::identity(6);
    for (MatFunc f : {MatFunc::sign, MatFunc::sqrt, MatFunc::polar}) {
        cfg.function = f;
        const RunSummary run = run_experiment(cfg);
        ASSERT_TRUE(run.all_converged()) << func_name(f);
        EXPECT_LE(run.schemes[0].iterations_to_tol, 1) << func_name(f);
        EXPECT_LT(run.schemes[0].steps[0].r, 1e-15) << func_name(f);
    }
}

TEST(Experiment, SameSeedSameBytes)
{
    const auto d1 = scratch("det1"), d2 = scratch("det2");
    ExperimentConfig cfg = small_config();
    cfg.function = MatFunc::sqrt;
    cfg.output_dir = d1.string();
    run_experiment(cfg);
    cfg.output_dir = d2.string();
    run_experiment(cfg);
    for (const char* f : {"newton.csv", "pade1.csv", "pade2.csv", "summary.txt"}) {
        const std::string a = slurp(d1 / f);
        EXPECT_FALSE(a.empty()) << f;
        EXPECT_EQ(a, slurp(d2 / f)) << f;
    }
}

TEST(Experiment, PolarOnRectangularOverride)
{
    ExperimentConfig cfg;
    cfg.function = MatFunc::polar;
    cfg.a_override = random_gaussian(9, 5, 4);
    const RunSummary run = run_experiment(cfg);
    EXPECT_TRUE(run.all_converged());
    EXPECT_TRUE(std::isnan(run.schemes[0].max_group_residual));
}

TEST(Experiment, FailingSchemeRecordedOthersRun)
{
    ExperimentConfig cfg = small_config();
    cfg.max_iter = 3;
    const RunSummary run = run_experiment(cfg);
    ASSERT_EQ(run.schemes.size(), 3u);
    EXPECT_FALSE(run.schemes[0].converged);
    EXPECT_TRUE(run.schemes[0].not_converged);
    EXPECT_FALSE(run.schemes[0].error.empty());
    EXPECT_TRUE(run.schemes[2].converged);
}

TEST(Experiment, ConfigValidation)
{
    ExperimentConfig cfg;
    cfg.n = 3;
    EXPECT_THROW(run_experiment(cfg), Error);
    cfg.n = 4;
    cfg.schemes.clear();
    EXPECT_THROW(run_experiment(cfg), Error);
    cfg = ExperimentConfig{};
    cfg.tol = 0.0;
    EXPECT_THROW(run_experiment(cfg), Error);
}

TEST(Cli, MissingFunctionIsUsageError)
{
    const auto dir = scratch("cli_usage");
    EXPECT_EQ(run_cli("--n 4", dir), 1);
    EXPECT_NE(slurp(dir / "stderr.txt").find("--function"), std::string::npos);
}

TEST(Cli, OddSymplecticSize)
{
    const auto dir = scratch("cli_odd");
    EXPECT_EQ(run_cli("--function sign --n 3 --group symplectic --out \"" + (dir / "o").string() + "\"", dir), 1);
    EXPECT_NE(slurp(dir / "stderr.txt").find("symplectic requires even n"), std::string::npos);
}

TEST(Cli, SmallRunWritesFiles)
{
    const auto dir = scratch("cli_ok");
    const fs::path out = dir / "d";
    EXPECT_EQ(run_cli("--function sign --scheme pade2 --n 10 --group symplectic --cond 10 --seed 7 --out \"" +
                          out.string() + "\"",
                      dir),
              0);
    EXPECT_TRUE(fs::exists(out / "pade2.csv"));
    EXPECT_TRUE(fs::exists(out / "summary.txt"));
    EXPECT_FALSE(fs::exists(out / "newton.csv"));
    EXPECT_NE(slurp(dir / "stdout.txt").find("pade2"), std::string::npos);
}

TEST(Cli, IterationBudgetFromEnvironment)
{
    const auto dir = scratch("cli_env");
    EXPECT_EQ(run_cli("--function sign --scheme newton --n 10 --cond 10 --seed 7 --quiet --out \"" +
                          (dir / "o").string() + "\"",
                      dir, "MATFUN_MAX_ITER=1"),
              2);
    EXPECT_EQ(run_cli("--function sign --n 10 --out \"" + (dir / "o").string() + "\"", dir, "MATFUN_MAX_ITER=abc"), 1);
}

TEST(Cli, ImaginaryAxisInputNamesTheProblem)
{
    const auto dir = scratch("cli_sing");
    {
        std::ofstream f(dir / "a.txt");
        f << "2 2\n0 -1\n1 0\n";
    }
    EXPECT_EQ(run_cli("--function sign --matrix-file \"" + (dir / "a.txt").string() + "\" --out \"" +
                          (dir / "o").string() + "\"",
                      dir),
              2);
    const std::string err = slurp(dir / "stderr.txt");
    EXPECT_NE(err.find("sign undefined: A appears to have imaginary-axis eigenvalues (solve singular at step 2)"),
              std::string::npos)
        << err;
}

TEST(Cli, UnknownSchemeAndMissingFile)
{
    const auto dir = scratch("cli_bad");
    EXPECT_EQ(run_cli("--function sign --scheme pade3 --n 4", dir), 1);
    EXPECT_EQ(run_cli("--function sign --matrix-file \"" + (dir / "nope.txt").string() + "\"", dir), 1);
}

} // namespace
