// Convergence experiment driver: sign / sqrt / polar of a structured test matrix,
// complex-step derivative per scheme, CSV per scheme plus summary.txt.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "matfun/experiment.hpp"

namespace {

int max_iter_from_env(int fallback)
{
    const char* v = std::getenv("MATFUN_MAX_ITER");
    if (!v || !*v) return fallback;
    try {
        std::size_t used = 0;
        const int n = std::stoi(v, &used);
        if (used == std::string(v).size() && n >= 1) return n;
    } catch (const std::exception&) {
    }
    throw matfun::Error(matfun::Errc::invalid_argument, std::string("MATFUN_MAX_ITER must be a positive integer, got '") + v + "'");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Matrix sign / square root / polar iterations with complex-step derivatives"};
    app.set_help_flag("--help", "print this help and exit"); // -h would clash with --h

    std::string function;
    std::vector<std::string> schemes;
    std::size_t n = 50;
    std::string group = "symplectic";
    double cond = 80.0;
    double h = std::numeric_limits<double>::epsilon();
    double tol = 1e-8;
    std::uint64_t seed = 1;
    std::string out = "out";
    std::string matrix_file, direction_file;
    bool quiet = false;

    app.add_option("--function", function, "sign, sqrt or polar")->required();
    app.add_option("--scheme", schemes, "newton, pade1 or pade2 (repeatable; default all three)");
    app.add_option("--n", n, "matrix size")->capture_default_str();
    app.add_option("--group", group, "symplectic, pseudo_orthogonal, perplectic or orthogonal")->capture_default_str();
    app.add_option("--cond", cond, "target Frobenius condition number")->capture_default_str();
    app.add_option("--h", h, "complex step")->capture_default_str();
    app.add_option("--tol", tol, "relative error tolerance")->capture_default_str();
    app.add_option("--seed", seed, "random seed")->capture_default_str();
    app.add_option("--out", out, "output directory")->capture_default_str();
    app.add_option("--matrix-file", matrix_file, "read A from a matrix text file");
    app.add_option("--direction-file", direction_file, "read the direction E from a matrix text file");
    app.add_flag("--quiet", quiet, "suppress the summary table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    matfun::ExperimentConfig cfg;
    try {
        cfg.function = matfun::parse_func(function);
        if (!schemes.empty()) {
            cfg.schemes.clear();
            for (const auto& s : schemes) cfg.schemes.push_back(matfun::parse_scheme(s));
        }
        cfg.n = n;
        cfg.group = matfun::parse_group(group);
        cfg.target_cond = cond;
        cfg.h = h;
        cfg.tol = tol;
        cfg.seed = seed;
        cfg.output_dir = out;
        cfg.max_iter = max_iter_from_env(cfg.max_iter);
        if (!matrix_file.empty()) cfg.a_override = matfun::load_matrix(matrix_file);
        if (!direction_file.empty()) cfg.e_override = matfun::load_matrix(direction_file);
        cfg.validate();
    } catch (const matfun::Error& e) {
        std::cerr << "error: " << e.what() << "\n" << app.help();
        return 1;
    }

    matfun::RunSummary run;
    try {
        run = matfun::run_experiment(cfg);
    } catch (const matfun::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        const auto c = e.code();
        return (c == matfun::Errc::not_converged || c == matfun::Errc::singular_matrix) ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    if (!quiet) std::cout << matfun::summary_text(cfg, run);
    for (const auto& s : run.schemes)
        if (!s.error.empty()) std::cerr << matfun::scheme_name(s.scheme) << ": " << s.error << "\n";
    return run.all_converged() ? 0 : 2;
}
