#pragma once

#include <algorithm>
#include <string>
#include <utility>

#include "matfun/iteration.hpp"
#include "matfun/pade.hpp"

namespace matfun {

// sqrt with the Newton scheme is the single-stream X <- (X + X^{-1} A)/2;
// db is the two-stream Newton variant; sqrt with a Pade scheme is two-stream too.
enum class FunctionKind { sign, sqrt, db, polar };

inline const char* kind_name(FunctionKind k)
{
    switch (k) {
    case FunctionKind::sign: return "sign";
    case FunctionKind::sqrt: return "sqrt";
    case FunctionKind::db: return "db";
    case FunctionKind::polar: return "polar";
    }
    return "unknown";
}

// x: the iterate (Y for two-stream square roots).
// z: Z for two-stream square roots, the fixed X0 for Newton sqrt, empty otherwise.
template<class T>
struct IterState {
    DenseMatrix<T> x;
    DenseMatrix<T> z;
};

template<class T>
class IterationMap {
public:
    IterationMap(FunctionKind kind, Scheme scheme, Flavor flavor = Flavor::transpose)
        : kind_(kind), scheme_(scheme), flavor_(flavor)
    {
        if (kind == FunctionKind::db && scheme != Scheme::newton) kind_ = FunctionKind::sqrt;
    }

    FunctionKind kind() const { return kind_; }
    Scheme scheme() const { return scheme_; }
    Flavor flavor() const { return flavor_; }
    bool pade() const { return scheme_ != Scheme::newton; }
    bool two_stream() const
    {
        return kind_ == FunctionKind::db || (kind_ == FunctionKind::sqrt && pade());
    }

    void check_input(const DenseMatrix<T>& a) const
    {
        if (a.empty()) throw Error(Errc::shape_mismatch, "input matrix is empty");
        if (kind_ == FunctionKind::polar) {
            if (a.rows() < a.cols())
                throw Error(Errc::shape_mismatch, "polar factor needs rows >= cols");
        } else if (!a.square()) {
            throw Error(Errc::shape_mismatch, std::string(kind_name(kind_)) + " needs a square matrix");
        }
    }

    IterState<T> start(const DenseMatrix<T>& a) const
    {
        check_input(a);
        if (two_stream()) return {a, DenseMatrix<T>::identity(a.rows())};
        if (kind_ == FunctionKind::sqrt) return {a, a};
        return {a, {}};
    }

    // derivative-stream start for direction e
    IterState<T> start_direction(const DenseMatrix<T>& e) const
    {
        if (two_stream()) return {e, DenseMatrix<T>(e.rows(), e.cols())};
        if (kind_ == FunctionKind::sqrt) return {e, e};
        return {e, {}};
    }

    IterState<T> apply(const IterState<T>& s) const
    {
        const auto& x = s.x;
        switch (kind_) {
        case FunctionKind::sign:
            if (!pade()) return {0.5 * (x + inverse(x)), {}};
            return {pade_rational_apply(x, x * x, order()), {}};
        case FunctionKind::polar:
            if (pade()) return {pade_rational_apply(x, gram(x), order()), {}};
            if (x.square()) return {0.5 * (x + adj(inverse(x))), {}};
            return {0.5 * (x + solve_right(x, gram(x))), {}};
        case FunctionKind::sqrt:
            if (!pade()) return {0.5 * (x + solve_linear(x, s.z)), s.z};
            {
                const PadeRational<T> r(s.z * x, order());
                return {x * r.r, r.r * s.z};
            }
        case FunctionKind::db:
            return {0.5 * (x + inverse(s.z)), 0.5 * (s.z + inverse(x))};
        }
        throw Error(Errc::invalid_argument, "unknown iteration kind");
    }

    // One step of the value iteration together with its directional derivative.
    std::pair<IterState<T>, IterState<T>> apply_coupled(const IterState<T>& s, const IterState<T>& ds) const
    {
        const auto& x = s.x;
        const auto& e = ds.x;
        switch (kind_) {
        case FunctionKind::sign:
            if (!pade()) {
                const auto xi = inverse(x);
                return {{0.5 * (x + xi), {}}, {0.5 * (e - xi * e * xi), {}}};
            } else {
                const PadeRational<T> r(x * x, order());
                const auto dr = r.derivative(x * e + e * x, order());
                return {{x * r.r, {}}, {e * r.r + x * dr, {}}};
            }
        case FunctionKind::polar:
            if (pade()) {
                const PadeRational<T> r(gram(x), order());
                const auto dr = r.derivative(adj(x) * e + adj(e) * x, order());
                return {{x * r.r, {}}, {e * r.r + x * dr, {}}};
            }
            if (x.square()) {
                const auto xit = adj(inverse(x));
                return {{0.5 * (x + xit), {}}, {0.5 * (e - xit * adj(e) * xit), {}}};
            } else {
                const auto g = gram(x);
                const LU<T> glu(g);
                const auto gi = glu.solve(DenseMatrix<T>::identity(g.rows()));
                const auto dg = adj(x) * e + adj(e) * x;
                const auto n = DenseMatrix<T>::identity(g.rows());
                return {{0.5 * (x + x * gi), {}}, {0.5 * (e * (n + gi) - x * gi * dg * gi), {}}};
            }
        case FunctionKind::sqrt:
            if (!pade()) {
                const auto xi = inverse(x);
                const auto xiz = xi * s.z;
                return {{0.5 * (x + xiz), s.z}, {0.5 * (e - xi * e * xiz + xi * ds.z), ds.z}};
            } else {
                const auto& z = s.z;
                const auto& f = ds.z;
                const PadeRational<T> r(z * x, order());
                const auto dr = r.derivative(f * x + z * e, order());
                return {{x * r.r, r.r * z}, {e * r.r + x * dr, dr * z + r.r * f}};
            }
        case FunctionKind::db: {
            const auto yi = inverse(x);
            const auto zi = inverse(s.z);
            return {{0.5 * (x + zi), 0.5 * (s.z + yi)},
                    {0.5 * (e - zi * ds.z * zi), 0.5 * (ds.z - yi * e * yi)}};
        }
        }
        throw Error(Errc::invalid_argument, "unknown iteration kind");
    }

    // Kind-specific residual, relative where a natural scale exists:
    // sign ||X^2 - I||/||X||^2, sqrt ||X^2 - A||/||A||,
    // two-stream max(||Y^2 - A||/||A||, ||ZY - I||), polar ||X^T X - I||.
    double residual(const IterState<T>& s, const DenseMatrix<T>& a) const
    {
        const auto& x = s.x;
        switch (kind_) {
        case FunctionKind::sign: {
            const double nx = frob_norm(x);
            return frob_norm(x * x - DenseMatrix<T>::identity(x.rows())) / (nx * nx);
        }
        case FunctionKind::polar:
            return frob_norm(gram(x) - DenseMatrix<T>::identity(x.cols()));
        case FunctionKind::sqrt:
        case FunctionKind::db: {
            const double r = frob_norm(x * x - a) / frob_norm(a);
            if (!two_stream()) return r;
            return std::max(r, frob_norm(s.z * x - DenseMatrix<T>::identity(x.rows())));
        }
        }
        return 0.0;
    }

    // relative change ||X' - X||/||X'||, maximised over both streams when there are two
    double step_change(const IterState<T>& prev, const IterState<T>& next) const
    {
        double c = rel_change(prev.x, next.x);
        if (two_stream()) c = std::max(c, rel_change(prev.z, next.z));
        return c;
    }

    static double rel_change(const DenseMatrix<T>& prev, const DenseMatrix<T>& next)
    {
        const double d = frob_norm(next - prev);
        const double n = frob_norm(next);
        return n > 0.0 ? d / n : d;
    }

private:
    PadeOrder order() const { return *scheme_order(scheme_); }
    DenseMatrix<T> adj(const DenseMatrix<T>& x) const { return flavor_adjoint(x, flavor_); }
    DenseMatrix<T> gram(const DenseMatrix<T>& x) const { return adj(x) * x; }

    FunctionKind kind_;
    Scheme scheme_;
    Flavor flavor_;
};

template<class T>
struct EvalResult {
    DenseMatrix<T> value;
    DenseMatrix<T> aux; // Z ~ A^{-1/2} for two-stream square roots
    IterationTrace<T> trace;
    int iterations = 0;
};

namespace detail {

template<class T>
std::optional<double> group_residual_of(const DenseMatrix<T>& x, const IterOptions& opts)
{
    if (!opts.group || !x.square() || x.rows() != opts.group->n()) return std::nullopt;
    if constexpr (is_complex_v<T>)
        return group_residual(re(x), *opts.group);
    else
        return group_residual(x, *opts.group);
}

template<class T>
void record(IterationTrace<T>& tr, const IterState<T>& s, int k, double change, double res,
            const IterOptions& opts, bool two_stream)
{
    tr.steps.push_back({k, change, res, group_residual_of(s.x, opts)});
    if (opts.record_trace) {
        tr.iterates.push_back(s.x);
        if (two_stream) tr.aux_iterates.push_back(s.z);
    }
}

inline Error at_step(const Error& e, int k)
{
    if (e.code() != Errc::singular_matrix) return e;
    return Error(Errc::singular_matrix,
                 std::string(e.what()) + " (solve singular at step " + std::to_string(k) + ")", k);
}

} // namespace detail

// Runs a value iteration from A. Stops once the relative step change is <= tol and
// the residual is <= 10 tol; aborts when the residual climbs 1e6 above its minimum.
template<class T>
EvalResult<T> run_iteration(const IterationMap<T>& map, const DenseMatrix<T>& a, const IterOptions& opts)
{
    opts.validate();
    EvalResult<T> out;
    IterState<T> s = map.start(a);
    double res = map.residual(s, a);
    double best = res;
    detail::record(out.trace, s, 0, std::numeric_limits<double>::quiet_NaN(), res, opts, map.two_stream());
    const int limit = opts.fixed_steps ? *opts.fixed_steps : opts.max_iter;
    bool done = opts.fixed_steps.has_value() && *opts.fixed_steps == 0;
    for (int k = 1; k <= limit && !done; ++k) {
        IterState<T> next;
        try {
            next = map.apply(s);
        } catch (const Error& e) {
            throw detail::at_step(e, k);
        }
        if (!next.x.all_finite() || (map.two_stream() && !next.z.all_finite()))
            throw Error(Errc::not_converged, "iterate overflowed at step " + std::to_string(k), k);
        const double change = map.step_change(s, next);
        s = std::move(next);
        res = map.residual(s, a);
        detail::record(out.trace, s, k, change, res, opts, map.two_stream());
        out.iterations = k;
        if (opts.fixed_steps) {
            done = k == *opts.fixed_steps;
            continue;
        }
        if (change <= opts.tol && res <= 10.0 * opts.tol) {
            done = true;
            break;
        }
        // a non-finite residual (e.g. X_k = 0) is left to the next solve to diagnose
        if (!std::isfinite(res)) continue;
        best = std::min(best, res);
        if (res > 1e6 * best)
            throw Error(Errc::not_converged,
                        "iteration diverging: residual grew by 1e6 at step " + std::to_string(k), k);
    }
    if (!done)
        throw Error(Errc::not_converged,
                    std::string(kind_name(map.kind())) + "/" + scheme_name(map.scheme()) +
                        " did not converge in " + std::to_string(opts.max_iter) + " iterations");
    out.value = s.x;
    if (map.two_stream()) out.aux = s.z;
    return out;
}

template<class T>
EvalResult<T> newton_sign(const DenseMatrix<T>& a, const IterOptions& opts = {})
{
    return run_iteration(IterationMap<T>(FunctionKind::sign, Scheme::newton), a, opts);
}

template<class T>
EvalResult<T> newton_sqrt(const DenseMatrix<T>& a, const IterOptions& opts = {})
{
    return run_iteration(IterationMap<T>(FunctionKind::sqrt, Scheme::newton), a, opts);
}

// value ~ A^{1/2}, aux ~ A^{-1/2}
template<class T>
EvalResult<T> db_sqrt(const DenseMatrix<T>& a, const IterOptions& opts = {})
{
    return run_iteration(IterationMap<T>(FunctionKind::db, Scheme::newton), a, opts);
}

template<class T>
EvalResult<T> newton_polar(const DenseMatrix<T>& a, Flavor f = Flavor::transpose, const IterOptions& opts = {})
{
    try {
        return run_iteration(IterationMap<T>(FunctionKind::polar, Scheme::newton, f), a, opts);
    } catch (const Error& e) {
        if (e.code() == Errc::singular_matrix) throw Error(Errc::rank_deficient, e.what(), e.step());
        throw;
    }
}

template<class T>
EvalResult<T> pade_sign(const DenseMatrix<T>& a, PadeOrder ord, const IterOptions& opts = {})
{
    return run_iteration(IterationMap<T>(FunctionKind::sign, scheme_for(ord)), a, opts);
}

// value ~ A^{1/2}, aux ~ A^{-1/2}
template<class T>
EvalResult<T> pade_sqrt(const DenseMatrix<T>& a, PadeOrder ord, const IterOptions& opts = {})
{
    return run_iteration(IterationMap<T>(FunctionKind::sqrt, scheme_for(ord)), a, opts);
}

template<class T>
EvalResult<T> pade_polar(const DenseMatrix<T>& a, PadeOrder ord, Flavor f = Flavor::transpose,
                         const IterOptions& opts = {})
{
    try {
        // the rational update keeps zero singular values at zero, so check rank up front
        if (a.rows() >= a.cols()) LU<T>(flavor_adjoint(a, f) * a);
        return run_iteration(IterationMap<T>(FunctionKind::polar, scheme_for(ord), f), a, opts);
    } catch (const Error& e) {
        if (e.code() == Errc::singular_matrix) throw Error(Errc::rank_deficient, e.what(), e.step());
        throw;
    }
}

} // namespace matfun
