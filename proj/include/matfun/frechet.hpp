#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "matfun/sylvester.hpp"

namespace matfun {

struct CoupledResult {
    Matrix value;
    Matrix derivative;
    // two-stream square roots also carry A^{-1/2} and its derivative
    std::optional<Matrix> inverse_value;
    std::optional<Matrix> inverse_derivative;
    IterationTrace<double> trace;
    int iterations = 0;
};

struct CsResult {
    Matrix value;      // Re of the final iterate
    Matrix derivative; // Im of the final iterate over h
    std::optional<Matrix> inverse_value;
    std::optional<Matrix> inverse_derivative;
    double h = 0.0;
    IterationTrace<double> trace; // iterates = Re X_k, derivative_iterates = Im X_k / h
    int iterations = 0;
};

struct SecondDerivativeResult {
    Matrix value; // F(A)
    Matrix l_ae;  // L(A, E)
    Matrix l_ad;  // L(A, D)
    Matrix l2;    // second derivative L2(A; D, E)
    IterationTrace<double> trace;
    int iterations = 0;
};

// Which iteration computes a given function under a given scheme.
inline FunctionKind iteration_kind(MatFunc f, Scheme s)
{
    switch (f) {
    case MatFunc::sign: return FunctionKind::sign;
    case MatFunc::polar: return FunctionKind::polar;
    case MatFunc::sqrt: return s == Scheme::newton ? FunctionKind::db : FunctionKind::sqrt;
    }
    return FunctionKind::sign;
}

namespace detail {

inline IterState<double> re_state(const IterState<cplx>& s)
{
    return {re(s.x), s.z.empty() ? Matrix{} : re(s.z)};
}

// relative change of the real and imaginary parts taken separately
inline double split_change(const IterationMap<cplx>& map, const IterState<cplx>& a, const IterState<cplx>& b)
{
    const IterationMap<double> rmap(map.kind(), map.scheme(), map.flavor());
    const double cr = rmap.step_change(re_state(a), re_state(b));
    IterState<double> ia{im(a.x), a.z.empty() ? Matrix{} : im(a.z)};
    IterState<double> ib{im(b.x), b.z.empty() ? Matrix{} : im(b.z)};
    return std::max(cr, rmap.step_change(ia, ib));
}

inline void finish_two_stream(CoupledResult& r, const IterState<double>& s, const IterState<double>& ds,
                              bool two)
{
    r.value = s.x;
    r.derivative = ds.x;
    if (two) {
        r.inverse_value = s.z;
        r.inverse_derivative = ds.z;
    }
}

inline CoupledResult run_coupled_real(const IterationMap<double>& map, const Matrix& a, const Matrix& e,
                                      const IterOptions& opts)
{
    opts.validate();
    a.check_same(e);
    CoupledResult out;
    IterState<double> s = map.start(a);
    IterState<double> ds = map.start_direction(e);
    const bool two = map.two_stream();
    double res = map.residual(s, a);
    double best = res;
    auto log = [&](int k, double change) {
        out.trace.steps.push_back({k, change, res, group_residual_of(s.x, opts)});
        if (opts.record_trace) {
            out.trace.iterates.push_back(s.x);
            out.trace.derivative_iterates.push_back(ds.x);
            if (two) out.trace.aux_iterates.push_back(s.z);
        }
    };
    log(0, std::numeric_limits<double>::quiet_NaN());
    const int limit = opts.fixed_steps ? *opts.fixed_steps : opts.max_iter;
    bool done = opts.fixed_steps.has_value() && *opts.fixed_steps == 0;
    for (int k = 1; k <= limit && !done; ++k) {
        std::pair<IterState<double>, IterState<double>> nx;
        try {
            nx = map.apply_coupled(s, ds);
        } catch (const Error& err) {
            throw at_step(err, k);
        }
        if (!nx.first.x.all_finite() || !nx.second.x.all_finite())
            throw Error(Errc::not_converged, "coupled iterate overflowed at step " + std::to_string(k), k);
        const double change =
            std::max(map.step_change(s, nx.first), map.step_change(ds, nx.second));
        s = std::move(nx.first);
        ds = std::move(nx.second);
        res = map.residual(s, a);
        log(k, change);
        out.iterations = k;
        if (opts.fixed_steps) {
            done = k == *opts.fixed_steps;
            continue;
        }
        if (change <= opts.tol && res <= 10.0 * opts.tol) {
            done = true;
            break;
        }
        best = std::min(best, res);
        if (res > 1e6 * best)
            throw Error(Errc::not_converged,
                        "coupled iteration diverging at step " + std::to_string(k), k);
    }
    if (!done)
        throw Error(Errc::not_converged, "coupled iteration did not converge in " +
                                             std::to_string(opts.max_iter) + " iterations");
    finish_two_stream(out, s, ds, two);
    return out;
}

} // namespace detail

// Coupled Newton-type iteration for (F(A), L_F(A, E)). kind is sign, sqrt
// (single stream, A treated as X0), db or polar (transpose flavor).
inline CoupledResult coupled_newton(FunctionKind kind, const Matrix& a, const Matrix& e, const IterOptions& opts = {})
{
    return detail::run_coupled_real(IterationMap<double>(kind, Scheme::newton), a, e, opts);
}

// Coupled rational iteration; kind is sign, sqrt (two streams) or polar.
inline CoupledResult coupled_pade(FunctionKind kind, const Matrix& a, const Matrix& e, PadeOrder ord,
                                  const IterOptions& opts = {})
{
    if (kind == FunctionKind::db) kind = FunctionKind::sqrt;
    return detail::run_coupled_real(IterationMap<double>(kind, scheme_for(ord)), a, e, opts);
}

inline CoupledResult coupled_run(FunctionKind kind, Scheme scheme, const Matrix& a, const Matrix& e,
                                 const IterOptions& opts = {})
{
    return detail::run_coupled_real(IterationMap<double>(kind, scheme), a, e, opts);
}

// Complex-step derivative: run the iteration on A + ihE in complex arithmetic and
// read F(A) ~ Re X_k, L_F(A, E) ~ Im X_k / h. Real A and E only; polar uses the
// plain transpose inside complex arithmetic.
inline CsResult cs_derivative(FunctionKind kind, Scheme scheme, const Matrix& a, const Matrix& e,
                              double h = std::numeric_limits<double>::epsilon(), const IterOptions& opts = {})
{
    opts.validate();
    a.check_same(e);
    if (!(h > 0.0) || !std::isfinite(h)) throw Error(Errc::invalid_argument, "h must be positive");
    const IterationMap<cplx> map(kind, scheme, Flavor::transpose);
    const IterationMap<double> rmap(kind, scheme, Flavor::transpose);
    const CMatrix ah = make_complex(a, e, h);
    const bool two = map.two_stream();

    CsResult out;
    out.h = h;
    IterState<cplx> s = map.start(ah);
    auto real_res = [&]() { return rmap.residual(detail::re_state(s), a); };
    double res = real_res();
    double best = res;
    auto log = [&](int k, double change) {
        out.trace.steps.push_back({k, change, res, detail::group_residual_of(s.x, opts)});
        if (opts.record_trace) {
            out.trace.iterates.push_back(re(s.x));
            out.trace.derivative_iterates.push_back((1.0 / h) * im(s.x));
            if (two) out.trace.aux_iterates.push_back(re(s.z));
        }
    };
    log(0, std::numeric_limits<double>::quiet_NaN());
    const int limit = opts.fixed_steps ? *opts.fixed_steps : opts.max_iter;
    bool done = opts.fixed_steps.has_value() && *opts.fixed_steps == 0;
    for (int k = 1; k <= limit && !done; ++k) {
        IterState<cplx> next;
        try {
            next = map.apply(s);
        } catch (const Error& err) {
            throw detail::at_step(err, k);
        }
        if (!next.x.all_finite() || (two && !next.z.all_finite()))
            throw Error(Errc::not_converged, "complex iterate overflowed at step " + std::to_string(k), k);
        const double change = detail::split_change(map, s, next);
        s = std::move(next);
        res = real_res();
        log(k, change);
        out.iterations = k;
        if (opts.fixed_steps) {
            done = k == *opts.fixed_steps;
            continue;
        }
        if (change <= opts.tol) {
            if (res <= 10.0 * opts.tol) {
                done = true;
                break;
            }
            // the complex iteration has settled but its real part is not F(A): h is too large
            if (map.residual(s, ah) <= 10.0 * opts.tol)
                throw Error(Errc::step_too_large,
                            "real part fails certification (residual " + std::to_string(res) +
                                "); reduce h",
                            k);
        }
        best = std::min(best, res);
        if (res > 1e6 * best)
            throw Error(Errc::not_converged, "complex-step iteration diverging at step " + std::to_string(k), k);
    }
    if (!done)
        throw Error(Errc::not_converged, "complex-step iteration did not converge in " +
                                             std::to_string(opts.max_iter) + " iterations");
    out.value = re(s.x);
    out.derivative = (1.0 / h) * im(s.x);
    if (two) {
        out.inverse_value = re(s.z);
        out.inverse_derivative = (1.0 / h) * im(s.z);
    }
    return out;
}

// Per-step distance between the complex-step iterates and the coupled iterates,
// T_k = (||X_k - Re X^_k|| + ||E_k - Im X^_k / h||) / scale. The scale defaults to
// ||F(A)|| + ||L_F(A, E)|| taken from the converged coupled run.
inline std::vector<double> cs_vs_coupled_gap(FunctionKind kind, Scheme scheme, const Matrix& a, const Matrix& e,
                                             double h, IterOptions opts = {},
                                             std::optional<double> scale = std::nullopt)
{
    opts.record_trace = true;
    const CsResult cs = cs_derivative(kind, scheme, a, e, h, opts);
    IterOptions copts = opts;
    copts.fixed_steps = cs.iterations;
    copts.max_iter = std::max(copts.max_iter, cs.iterations);
    const CoupledResult cp = coupled_run(kind, scheme, a, e, copts);
    const double sc = scale ? *scale : frob_norm(cp.value) + frob_norm(cp.derivative);
    if (!(sc > 0.0)) throw Error(Errc::invalid_argument, "gap scale must be positive");
    std::vector<double> t;
    for (std::size_t k = 0; k < cs.trace.iterates.size(); ++k) {
        const double d = frob_norm(cp.trace.iterates[k] - cs.trace.iterates[k]) +
                         frob_norm(cp.trace.derivative_iterates[k] - cs.trace.derivative_iterates[k]);
        t.push_back(d / sc);
    }
    return t;
}

// Second Fréchet derivative via the coupled iteration run in complex arithmetic from
// X^_0 = A + ihD, E^_0 = E.  Re X -> F(A), Im X / h -> L(A, D), Re E -> L(A, E),
// Im E / h -> L2(A; D, E).
inline SecondDerivativeResult second_frechet_cs(FunctionKind kind, Scheme scheme, const Matrix& a, const Matrix& e,
                                                const Matrix& d,
                                                double h = std::numeric_limits<double>::epsilon(),
                                                const IterOptions& opts = {})
{
    opts.validate();
    a.check_same(e);
    a.check_same(d);
    if (!(h > 0.0) || !std::isfinite(h)) throw Error(Errc::invalid_argument, "h must be positive");
    const IterationMap<cplx> map(kind, scheme, Flavor::transpose);
    const IterationMap<double> rmap(kind, scheme, Flavor::transpose);
    IterState<cplx> s = map.start(make_complex(a, d, h));
    IterState<cplx> ds = map.start_direction(to_complex(e));

    SecondDerivativeResult out;
    double res = rmap.residual(detail::re_state(s), a);
    out.trace.steps.push_back({0, std::numeric_limits<double>::quiet_NaN(), res, detail::group_residual_of(s.x, opts)});
    const int limit = opts.fixed_steps ? *opts.fixed_steps : opts.max_iter;
    bool done = opts.fixed_steps.has_value() && *opts.fixed_steps == 0;
    for (int k = 1; k <= limit && !done; ++k) {
        std::pair<IterState<cplx>, IterState<cplx>> nx;
        try {
            nx = map.apply_coupled(s, ds);
        } catch (const Error& err) {
            throw detail::at_step(err, k);
        }
        if (!nx.first.x.all_finite() || !nx.second.x.all_finite())
            throw Error(Errc::not_converged, "iterate overflowed at step " + std::to_string(k), k);
        const double change =
            std::max(detail::split_change(map, s, nx.first), detail::split_change(map, ds, nx.second));
        s = std::move(nx.first);
        ds = std::move(nx.second);
        res = rmap.residual(detail::re_state(s), a);
        out.trace.steps.push_back({k, change, res, detail::group_residual_of(s.x, opts)});
        out.iterations = k;
        if (opts.fixed_steps) {
            done = k == *opts.fixed_steps;
            continue;
        }
        if (change <= opts.tol && res <= 10.0 * opts.tol) done = true;
    }
    if (!done)
        throw Error(Errc::not_converged, "second-derivative iteration did not converge in " +
                                             std::to_string(opts.max_iter) + " iterations");
    out.value = re(s.x);
    out.l_ad = (1.0 / h) * im(s.x);
    out.l_ae = re(ds.x);
    out.l2 = (1.0 / h) * im(ds.x);
    return out;
}

// (F(A), L_F(A, E)) from the coupled quintic iteration driven to roundoff level and
// certified by the value residual; the fallback reference when A is too large for
// the Kronecker solve.
inline std::pair<Matrix, Matrix> coupled_reference(MatFunc f, const Matrix& a, const Matrix& e)
{
    const FunctionKind kind = iteration_kind(f, Scheme::pade2);
    const IterationMap<double> map(kind, Scheme::pade2);
    IterState<double> s = map.start(a);
    IterState<double> ds = map.start_direction(e);
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 100; ++k) {
        auto nx = map.apply_coupled(s, ds);
        const double change = std::max(map.step_change(s, nx.first), map.step_change(ds, nx.second));
        s = std::move(nx.first);
        ds = std::move(nx.second);
        if (change <= 1e-13) break;
        if (change >= prev && change < 1e-6) break;
        prev = change;
    }
    const double tol = detail::cert_tol(a.cols());
    const double r = map.residual(s, a);
    if (!(r <= tol))
        throw Error(Errc::not_converged, "coupled reference failed certification: residual " + std::to_string(r));
    return {s.x, ds.x};
}

} // namespace matfun
