#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "matfun/iterations.hpp"

namespace matfun {

inline constexpr std::size_t kMaxSylvesterSize = 60;

// Solves S X + X S = C through the n^2 x n^2 Kronecker system
// (I (x) S + S^T (x) I) vec X = vec C. Cost is O(n^6), hence the size cap.
template<class T>
DenseMatrix<T> solve_sylvester(const DenseMatrix<T>& s, const DenseMatrix<T>& c)
{
    if (!s.square() || !c.square() || s.rows() != c.rows())
        throw Error(Errc::shape_mismatch, "Sylvester coefficient and right-hand side must be square and equal size");
    const std::size_t n = s.rows();
    if (n > kMaxSylvesterSize)
        throw Error(Errc::invalid_argument,
                    "Kronecker Sylvester solve limited to n <= " + std::to_string(kMaxSylvesterSize) +
                        ", got " + std::to_string(n));
    const std::size_t N = n * n;
    // unknown X(a, b) sits at index a n + b; row (i, j) reads S(i, k) X(k, j) + X(i, k) S(k, j)
    DenseMatrix<T> k(N, N);
    DenseMatrix<T> rhs(N, 1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            T* row = k.row(i * n + j);
            for (std::size_t m = 0; m < n; ++m) {
                row[m * n + j] += s(i, m);
                row[i * n + m] += s(m, j);
            }
            rhs(i * n + j, 0) = c(i, j);
        }
    DenseMatrix<T> v;
    try {
        v = LU<T>(std::move(k)).solve(std::move(rhs));
    } catch (const Error& e) {
        if (e.code() == Errc::singular_matrix)
            throw Error(Errc::singular_matrix, "Sylvester system singular: S and -S share an eigenvalue");
        throw;
    }
    return DenseMatrix<T>(n, n, std::vector<T>(v.values()));
}

enum class RefKind { sign, sqrt, invsqrt, polar };

inline const char* ref_kind_name(RefKind k)
{
    switch (k) {
    case RefKind::sign: return "sign";
    case RefKind::sqrt: return "sqrt";
    case RefKind::invsqrt: return "invsqrt";
    case RefKind::polar: return "polar";
    }
    return "unknown";
}

namespace detail {

// Relative certification threshold: 1e-12, widened with n so roundoff at large
// sizes does not masquerade as non-convergence.
inline double cert_tol(std::size_t n)
{
    return std::max(1e-12, 100.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon());
}

// Runs the quintic rational iteration until the step change is at roundoff level
// (<= 1e-14) or stops shrinking.
inline IterState<double> tight_iterate(const IterationMap<double>& map, const Matrix& a)
{
    IterState<double> s = map.start(a);
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 100; ++k) {
        IterState<double> next;
        try {
            next = map.apply(s);
        } catch (const Error& e) {
            throw at_step(e, k);
        }
        if (!next.x.all_finite() || (map.two_stream() && !next.z.all_finite()))
            throw Error(Errc::not_converged, "reference iteration overflowed", k);
        const double change = map.step_change(s, next);
        s = std::move(next);
        if (change <= 1e-14) break;
        if (change >= prev && change < 1e-6) break;
        prev = change;
    }
    return s;
}

[[noreturn]] inline void cert_fail(RefKind k, double r, double tol)
{
    throw Error(Errc::not_converged, std::string("reference ") + ref_kind_name(k) +
                                         " failed certification: residual " + std::to_string(r) +
                                         " above " + std::to_string(tol));
}

} // namespace detail

// High-accuracy F(A) with no eigensolver: iterate to roundoff level, then certify
// by residual. Throws NotConverged if the certificate fails.
inline Matrix reference_value(RefKind kind, const Matrix& a)
{
    const std::size_t n = a.cols();
    const double tol = detail::cert_tol(n);
    const Matrix I = Matrix::identity(n);
    switch (kind) {
    case RefKind::sign: {
        IterationMap<double> map(FunctionKind::sign, Scheme::pade2);
        const Matrix x = detail::tight_iterate(map, a).x;
        const double nx = frob_norm(x);
        const double r = frob_norm(x * x - I) / (nx * nx);
        if (!(r <= tol)) detail::cert_fail(kind, r, tol);
        const double c = frob_norm(x * a - a * x) / (nx * frob_norm(a));
        if (!(c <= tol)) detail::cert_fail(kind, c, tol);
        return x;
    }
    case RefKind::sqrt:
    case RefKind::invsqrt: {
        IterationMap<double> map(FunctionKind::sqrt, Scheme::pade2);
        const auto s = detail::tight_iterate(map, a);
        const double ny = frob_norm(s.x);
        const double r = frob_norm(s.x * s.x - a) / std::max(frob_norm(a), ny * ny);
        if (!(r <= tol)) detail::cert_fail(kind, r, tol);
        if (kind == RefKind::sqrt) return s.x;
        const double rz = frob_norm(s.z * s.x - I) / std::max(1.0, frob_norm(s.z) * ny);
        if (!(rz <= tol)) detail::cert_fail(kind, rz, tol);
        return s.z;
    }
    case RefKind::polar: {
        if (a.rows() < a.cols()) throw Error(Errc::shape_mismatch, "polar factor needs rows >= cols");
        try {
            LU<double>(transpose(a) * a);
        } catch (const Error&) {
            throw Error(Errc::rank_deficient, "polar reference: matrix is numerically rank deficient");
        }
        IterationMap<double> map(FunctionKind::polar, Scheme::pade2);
        const Matrix x = detail::tight_iterate(map, a).x;
        const double r = frob_norm(transpose(x) * x - I);
        if (!(r <= tol)) detail::cert_fail(kind, r, tol);
        return x;
    }
    }
    throw Error(Errc::invalid_argument, "unknown reference kind");
}

enum class MatFunc { sign, sqrt, polar };

inline const char* func_name(MatFunc f)
{
    switch (f) {
    case MatFunc::sign: return "sign";
    case MatFunc::sqrt: return "sqrt";
    case MatFunc::polar: return "polar";
    }
    return "unknown";
}

inline MatFunc parse_func(const std::string& s)
{
    if (s == "sign") return MatFunc::sign;
    if (s == "sqrt") return MatFunc::sqrt;
    if (s == "polar") return MatFunc::polar;
    throw Error(Errc::invalid_argument, "unknown function '" + s + "' (sign, sqrt, polar)");
}

inline RefKind ref_kind(MatFunc f)
{
    switch (f) {
    case MatFunc::sign: return RefKind::sign;
    case MatFunc::sqrt: return RefKind::sqrt;
    case MatFunc::polar: return RefKind::polar;
    }
    return RefKind::sign;
}

// Fréchet derivative L_F(A, E) by Sylvester solves.
// sqrt: R X + X R = E with R = A^{1/2}.
// sign / polar: with B = (A^2)^{-1} resp. (A^T A)^{-1} and its square root H = B^{1/2},
// solve H X + X H = -B (dW) B where dW = A E + E A resp. A^T E + E^T A,
// then L = E H + A X (product rule on F(A) = A H).
inline Matrix frechet_direct(MatFunc f, const Matrix& a, const Matrix& e)
{
    a.check_same(e);
    switch (f) {
    case MatFunc::sqrt: {
        if (!a.square()) throw Error(Errc::shape_mismatch, "sqrt needs a square matrix");
        return solve_sylvester(reference_value(RefKind::sqrt, a), e);
    }
    case MatFunc::sign:
    case MatFunc::polar: {
        Matrix w, dw;
        if (f == MatFunc::sign) {
            if (!a.square()) throw Error(Errc::shape_mismatch, "sign needs a square matrix");
            w = a * a;
            dw = a * e + e * a;
        } else {
            if (a.rows() < a.cols()) throw Error(Errc::shape_mismatch, "polar factor needs rows >= cols");
            const Matrix at = transpose(a);
            w = at * a;
            dw = at * e + transpose(e) * a;
        }
        const Matrix b = inverse(w);
        const Matrix h = reference_value(RefKind::invsqrt, w);
        const Matrix x = solve_sylvester(h, -(b * dw * b));
        return e * h + a * x;
    }
    }
    throw Error(Errc::invalid_argument, "unknown function");
}

} // namespace matfun
