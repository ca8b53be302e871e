#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "matfun/groups.hpp"
#include "matfun/lu.hpp"

namespace matfun {

struct IterOptions {
    double tol = 1e-8;     // relative step change at which to stop
    int max_iter = 100;
    bool record_trace = false; // keep iterate snapshots
    std::optional<GroupForm> group; // if set, each step logs its group residual
    std::optional<int> fixed_steps; // run exactly this many steps, no stopping test

    void validate() const
    {
        if (!(tol >= std::numeric_limits<double>::epsilon()))
            throw Error(Errc::invalid_argument, "tol must be at least machine epsilon");
        if (max_iter < 1) throw Error(Errc::invalid_argument, "max_iter must be positive");
        if (fixed_steps && (*fixed_steps < 0 || *fixed_steps > max_iter))
            throw Error(Errc::invalid_argument, "fixed_steps must lie in [0, max_iter]");
    }
};

struct TraceStep {
    int k = 0;
    double step_rel_change = std::numeric_limits<double>::quiet_NaN(); // NaN at k = 0
    double residual = 0.0;
    std::optional<double> group_residual;
};

template<class T>
struct IterationTrace {
    std::vector<TraceStep> steps;
    std::vector<DenseMatrix<T>> iterates;            // main stream, when recorded
    std::vector<DenseMatrix<T>> aux_iterates;        // second stream (Z) of two-stream iterations
    std::vector<DenseMatrix<T>> derivative_iterates; // derivative stream of coupled / complex-step runs

    std::size_t size() const { return steps.size(); }

    double max_group_residual() const
    {
        double m = 0.0;
        for (const auto& s : steps)
            if (s.group_residual) m = std::max(m, *s.group_residual);
        return m;
    }
};

// Error measure ||(R - X)(R + X)^{-1}||_F for square X, or ||(R - X)(I + R^T X)^{-1}||_F for
// tall X. All supported iterations act on this quantity as an exact power map
// z -> z^p per eigen- or singular value, so it exposes the order from the first step on.
inline double cayley_error(const Matrix& x, const Matrix& ref)
{
    x.check_same(ref);
    try {
        if (x.square()) return frob_norm(solve_right(ref - x, ref + x));
        return frob_norm(solve_right(ref - x, Matrix::identity(x.cols()) + transpose(ref) * x));
    } catch (const Error& e) {
        if (e.code() == Errc::singular_matrix) return std::numeric_limits<double>::infinity();
        throw;
    }
}

// Least-squares slope of log e_{k+1} against log e_k. Pairs count when e_k <= 10,
// e_{k+1} >= floor (above roundoff) and the error strictly decreases.
inline double estimate_order(const std::vector<double>& errors,
                             double floor = 1e3 * std::numeric_limits<double>::epsilon())
{
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
        const double a = errors[k], b = errors[k + 1];
        if (!(a <= 10.0) || !(b >= floor) || !(b < a)) continue;
        xs.push_back(std::log(a));
        ys.push_back(std::log(b));
    }
    if (xs.size() < 2)
        throw Error(Errc::insufficient_data,
                    "order estimate needs two error pairs above the roundoff floor, got " +
                        std::to_string(xs.size()));
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (!(sxx > 0))
        throw Error(Errc::insufficient_data, "order estimate needs distinct error levels");
    return sxy / sxx;
}

// Roundoff floor for errors measured against ref: 1000 eps times the Frobenius
// condition number of ref (n for orthonormal columns).
inline double order_floor(const Matrix& ref)
{
    double c = static_cast<double>(ref.cols());
    if (ref.square()) {
        try {
            c = std::max(c, cond_estimate(ref));
        } catch (const Error&) {
        }
    }
    return 1e3 * std::numeric_limits<double>::epsilon() * c;
}

inline double estimate_order(const IterationTrace<double>& trace, const Matrix& ref)
{
    if (trace.iterates.empty())
        throw Error(Errc::insufficient_data, "trace holds no iterates (enable record_trace)");
    std::vector<double> errs;
    errs.reserve(trace.iterates.size());
    for (const auto& x : trace.iterates) errs.push_back(cayley_error(x, ref));
    return estimate_order(errs, order_floor(ref));
}

} // namespace matfun
