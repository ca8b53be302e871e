#pragma once

#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "matfun/frechet.hpp"
#include "matfun/generate.hpp"
#include "matfun/io.hpp"

namespace matfun {

struct ExperimentConfig {
    MatFunc function = MatFunc::sign;
    std::vector<Scheme> schemes{Scheme::newton, Scheme::pade1, Scheme::pade2};
    std::size_t n = 50;
    GroupKind group = GroupKind::symplectic;
    double target_cond = 80.0;
    double h = std::numeric_limits<double>::epsilon();
    double tol = 1e-8;
    std::uint64_t seed = 1;
    std::string output_dir; // empty: no files written
    int max_iter = 100;
    std::optional<Matrix> a_override;
    std::optional<Matrix> e_override;

    void validate() const
    {
        if (!(tol > 0.0)) throw Error(Errc::invalid_argument, "tol must be positive");
        if (!(h > 0.0)) throw Error(Errc::invalid_argument, "h must be positive");
        if (schemes.empty()) throw Error(Errc::invalid_argument, "at least one scheme is required");
        if (max_iter < 1) throw Error(Errc::invalid_argument, "max_iter must be positive");
        if (!a_override) {
            if (n < 2) throw Error(Errc::invalid_argument, "n must be at least 2");
            if (group == GroupKind::symplectic && n % 2 != 0)
                throw Error(Errc::invalid_argument, "symplectic requires even n");
        }
    }
};

struct StepRecord {
    int k = 0;
    double r = 0.0;              // relative error of Re X_k against F(A)
    double s = 0.0;              // relative error of Im X_k / h against L_F(A, E)
    double group_residual = 0.0; // NaN when no group form applies
    double t = 0.0;              // distance to the coupled iterates
};

struct SchemeSummary {
    Scheme scheme = Scheme::newton;
    bool converged = false;
    bool not_converged = false; // ran out of iterations or diverged
    int iterations_to_tol = -1;
    double final_r = std::numeric_limits<double>::quiet_NaN();
    double final_s = std::numeric_limits<double>::quiet_NaN();
    double max_group_residual = std::numeric_limits<double>::quiet_NaN();
    double max_gap = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> order;
    std::string error;
    std::vector<StepRecord> steps;
};

struct RunSummary {
    MatFunc function = MatFunc::sign;
    std::size_t rows = 0, cols = 0;
    double cond = std::numeric_limits<double>::quiet_NaN();
    double input_group_residual = std::numeric_limits<double>::quiet_NaN();
    std::vector<SchemeSummary> schemes;

    bool all_converged() const
    {
        for (const auto& s : schemes)
            if (!s.converged) return false;
        return true;
    }
};

inline std::string csv_text(const SchemeSummary& s)
{
    std::ostringstream os;
    os << "k,R,S,group_residual,T\n";
    for (const auto& r : s.steps)
        os << r.k << ',' << format_number(r.r) << ',' << format_number(r.s) << ','
           << format_number(r.group_residual) << ',' << format_number(r.t) << '\n';
    return os.str();
}

inline std::string summary_text(const ExperimentConfig& cfg, const RunSummary& run)
{
    std::ostringstream os;
    os << "function " << func_name(run.function) << "  size " << run.rows << "x" << run.cols;
    if (!cfg.a_override) os << "  group " << group_name(cfg.group) << "  target_cond " << format_number(cfg.target_cond);
    os << "  seed " << cfg.seed << "\n";
    os << "h " << format_number(cfg.h) << "  tol " << format_number(cfg.tol) << "  cond_F "
       << format_number(run.cond) << "  input_group_residual " << format_number(run.input_group_residual) << "\n";
    os << "scheme   iterations  final_R                  final_S                  max_group_residual       max_T                    order\n";
    for (const auto& s : run.schemes) {
        char line[512];
        const std::string iters = s.converged ? std::to_string(s.iterations_to_tol) : "-";
        const std::string order = s.order ? format_number(*s.order) : "n/a";
        std::snprintf(line, sizeof line, "%-8s %-11s %-24s %-24s %-24s %-24s %s\n", scheme_name(s.scheme),
                      iters.c_str(), format_number(s.final_r).c_str(), format_number(s.final_s).c_str(),
                      format_number(s.max_group_residual).c_str(), format_number(s.max_gap).c_str(),
                      order.c_str());
        os << line;
        if (!s.error.empty()) os << "  " << scheme_name(s.scheme) << ": " << s.error << "\n";
    }
    return os.str();
}

namespace detail {

inline double rel_or_abs(const Matrix& x, const Matrix& ref)
{
    const double d = frob_norm(x - ref);
    const double n = frob_norm(ref);
    return n > 0.0 ? d / n : d;
}

inline std::string describe_failure(MatFunc f, const Error& e)
{
    std::string msg = e.what();
    if (e.code() == Errc::singular_matrix && e.step()) {
        const std::string at = "(solve singular at step " + std::to_string(*e.step()) + ")";
        if (f == MatFunc::sign) return "sign undefined: A appears to have imaginary-axis eigenvalues " + at;
        if (f == MatFunc::sqrt) return "sqrt undefined: A appears to have eigenvalues on the closed negative real axis " + at;
        return "polar factor undefined: A appears to be rank deficient " + at;
    }
    return msg;
}

// One scheme: complex-step run and coupled run in lockstep, errors against the reference,
// stopping at the first k with R_k < tol and S_k < tol.
inline SchemeSummary run_scheme(const ExperimentConfig& cfg, Scheme scheme, const Matrix& a, const Matrix& e,
                                const Matrix& fref, const Matrix& lref, const std::optional<GroupForm>& form)
{
    SchemeSummary out;
    out.scheme = scheme;
    const FunctionKind kind = iteration_kind(cfg.function, scheme);
    const IterationMap<cplx> cmap(kind, scheme, Flavor::transpose);
    const IterationMap<double> rmap(kind, scheme, Flavor::transpose);
    const double scale = frob_norm(fref) + frob_norm(lref);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> cayley_errs;
    try {
        IterState<cplx> s = cmap.start(make_complex(a, e, cfg.h));
        IterState<double> x = rmap.start(a);
        IterState<double> dx = rmap.start_direction(e);
        double best_r = std::numeric_limits<double>::infinity();
        for (int k = 0;; ++k) {
            if (k > 0) {
                try {
                    s = cmap.apply(s);
                    auto nx = rmap.apply_coupled(x, dx);
                    x = std::move(nx.first);
                    dx = std::move(nx.second);
                } catch (const Error& err) {
                    throw at_step(err, k);
                }
                if (!s.x.all_finite() || !x.x.all_finite() || !dx.x.all_finite())
                    throw Error(Errc::not_converged, "iterate overflowed at step " + std::to_string(k), k);
            }
            const Matrix rx = re(s.x);
            const Matrix dxh = (1.0 / cfg.h) * im(s.x);
            StepRecord rec;
            rec.k = k;
            rec.r = rel_or_abs(rx, fref);
            rec.s = rel_or_abs(dxh, lref);
            rec.group_residual = form ? group_residual(rx, *form) : nan;
            rec.t = (frob_norm(x.x - rx) + frob_norm(dx.x - dxh)) / scale;
            out.steps.push_back(rec);
            cayley_errs.push_back(cayley_error(rx, fref));
            if (rec.r < cfg.tol && rec.s < cfg.tol) {
                out.converged = true;
                out.iterations_to_tol = k;
                break;
            }
            best_r = std::min(best_r, rec.r);
            if (k >= cfg.max_iter) throw Error(Errc::not_converged, "no convergence within " + std::to_string(cfg.max_iter) + " iterations");
            if (rec.r > 1e6 * best_r) throw Error(Errc::not_converged, "iteration diverging at step " + std::to_string(k), k);
        }
    } catch (const Error& err) {
        out.not_converged = err.code() == Errc::not_converged;
        if (err.code() == Errc::singular_matrix) out.not_converged = true;
        out.error = describe_failure(cfg.function, err);
    }
    if (!out.steps.empty()) {
        out.final_r = out.steps.back().r;
        out.final_s = out.steps.back().s;
        out.max_gap = 0.0;
        for (const auto& r : out.steps) out.max_gap = std::max(out.max_gap, r.t);
        if (form) {
            out.max_group_residual = 0.0;
            for (const auto& r : out.steps) out.max_group_residual = std::max(out.max_group_residual, r.group_residual);
        }
    }
    try {
        out.order = estimate_order(cayley_errs, order_floor(fref));
    } catch (const Error&) {
        out.order.reset();
    }
    return out;
}

} // namespace detail

// Runs every configured scheme on one input and, if output_dir is set, writes
// <scheme>.csv per scheme plus summary.txt. A failing scheme is recorded and the
// remaining schemes still run.
inline RunSummary run_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    Matrix a;
    std::optional<GroupForm> form;
    if (cfg.a_override) {
        a = *cfg.a_override;
    } else {
        GenSpec spec;
        spec.kind = cfg.group;
        spec.n = cfg.n;
        spec.target_cond = cfg.target_cond;
        spec.seed = cfg.seed;
        a = random_automorphism(spec);
    }
    if (a.square()) {
        try {
            const GroupForm f = GroupForm::make(cfg.group, a.rows());
            if (!cfg.a_override || group_residual(a, f) <= 1e-6) form = f;
        } catch (const Error&) {
        }
    }
    const Matrix e = cfg.e_override ? *cfg.e_override : random_direction(a.rows(), a.cols(), cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    if (e.rows() != a.rows() || e.cols() != a.cols())
        throw Error(Errc::shape_mismatch, "direction matrix shape differs from A");

    RunSummary run;
    run.function = cfg.function;
    run.rows = a.rows();
    run.cols = a.cols();
    if (a.square()) {
        try {
            run.cond = cond_estimate(a);
        } catch (const Error&) {
        }
    }
    if (form) run.input_group_residual = group_residual(a, *form);

    Matrix fref, lref;
    try {
        if (a.rows() <= kMaxSylvesterSize && a.cols() <= kMaxSylvesterSize) {
            fref = reference_value(ref_kind(cfg.function), a);
            lref = frechet_direct(cfg.function, a, e);
        } else {
            std::tie(fref, lref) = coupled_reference(cfg.function, a, e);
        }
    } catch (const Error& err) {
        // probe with the plain Newton iteration for a step-specific diagnosis
        IterOptions probe;
        probe.fixed_steps = 30;
        try {
            run_iteration(IterationMap<double>(iteration_kind(cfg.function, Scheme::newton), Scheme::newton), a, probe);
        } catch (const Error& perr) {
            if (perr.code() == Errc::singular_matrix)
                throw Error(Errc::singular_matrix, detail::describe_failure(cfg.function, perr), perr.step());
        }
        throw Error(err.code(), std::string(func_name(cfg.function)) + " reference failed: " + err.what());
    }

    for (Scheme sc : cfg.schemes) run.schemes.push_back(detail::run_scheme(cfg, sc, a, e, fref, lref, form));

    if (!cfg.output_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(cfg.output_dir);
        for (const auto& s : run.schemes) {
            std::ofstream out(fs::path(cfg.output_dir) / (std::string(scheme_name(s.scheme)) + ".csv"), std::ios::binary);
            if (!out) throw Error(Errc::parse_error, "cannot write into " + cfg.output_dir);
            out << csv_text(s);
        }
        std::ofstream sum(fs::path(cfg.output_dir) / "summary.txt", std::ios::binary);
        if (!sum) throw Error(Errc::parse_error, "cannot write into " + cfg.output_dir);
        sum << summary_text(cfg, run);
    }
    return run;
}

} // namespace matfun
