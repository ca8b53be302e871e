#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>

#include "matfun/groups.hpp"
#include "matfun/sylvester.hpp"

namespace matfun {

struct GenSpec {
    GroupKind kind = GroupKind::symplectic;
    std::size_t n = 2;
    double target_cond = 1.0;
    std::uint64_t seed = 0;
    std::optional<std::size_t> p; // pseudo-orthogonal split; defaults to ceil(n/2)

    GroupForm form() const
    {
        if (kind == GroupKind::pseudo_orthogonal && p) {
            if (*p > n) throw Error(Errc::invalid_argument, "signature p exceeds n");
            return GroupForm::pseudo_orthogonal(*p, n - *p);
        }
        return GroupForm::make(kind, n);
    }
};

namespace detail {

// Uniform [0, 1) from the top 53 bits, so the mapping is fixed across standard libraries.
inline double unit_uniform(std::mt19937_64& g)
{
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double standard_normal(std::mt19937_64& g)
{
    // Box-Muller; one draw per call keeps the stream position easy to reason about
    double u = unit_uniform(g);
    while (u <= 0.0) u = unit_uniform(g);
    const double v = unit_uniform(g);
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

// Orthogonal block-rotation matrix of size k: 2x2 rotations by theta or pi - theta
// (chosen at random, so eigenvalues fall in either half-plane), a trailing 1 if k is odd.
inline Matrix rotation_blocks(std::size_t k, double theta, std::mt19937_64& g)
{
    Matrix d(k, k);
    std::size_t i = 0;
    for (; i + 1 < k; i += 2) {
        const double t = unit_uniform(g) < 0.5 ? theta : std::numbers::pi - theta;
        const double c = std::cos(t), s = std::sin(t);
        d(i, i) = c;
        d(i, i + 1) = -s;
        d(i + 1, i) = s;
        d(i + 1, i + 1) = c;
    }
    if (i < k) d(i, i) = 1.0;
    return d;
}

inline Matrix block_diag(const Matrix& a, const Matrix& b)
{
    Matrix d(a.rows() + b.rows(), a.cols() + b.cols());
    set_block(d, 0, 0, a);
    set_block(d, a.rows(), a.cols(), b);
    return d;
}

// A group element with spectrum on the unit circle at angles +-theta or pi +- theta.
inline Matrix unit_circle_element(const GroupForm& f, double theta, std::mt19937_64& g)
{
    const std::size_t n = f.n();
    switch (f.kind) {
    case GroupKind::symplectic: {
        // diag(B, B) with B orthogonal satisfies D^T J D = J
        const Matrix b = rotation_blocks(n / 2, theta, g);
        return block_diag(b, b);
    }
    case GroupKind::pseudo_orthogonal:
        return block_diag(rotation_blocks(f.p, theta, g), rotation_blocks(f.q, theta, g));
    case GroupKind::perplectic: {
        // V^T R V = diag(I_p, -I_q) for the orthogonal V below, so V D V^T is perplectic
        // whenever D is pseudo-orthogonal
        const std::size_t p = n - n / 2, q = n / 2;
        Matrix v(n, n);
        const double r = 1.0 / std::sqrt(2.0);
        std::size_t c = 0;
        for (std::size_t i = 0; i < n / 2; ++i, ++c) {
            v(i, c) = r;
            v(n - 1 - i, c) = r;
        }
        if (n % 2) v(n / 2, c++) = 1.0;
        for (std::size_t i = 0; i < n / 2; ++i, ++c) {
            v(i, c) = r;
            v(n - 1 - i, c) = -r;
        }
        const Matrix d = block_diag(rotation_blocks(p, theta, g), rotation_blocks(q, theta, g));
        return v * d * transpose(v);
    }
    case GroupKind::orthogonal:
        return rotation_blocks(n, theta, g);
    }
    throw Error(Errc::invalid_argument, "unknown group kind");
}

// Random Lie-algebra element S = M^{-1} K with K symmetric (skew M) or skew (symmetric M),
// so that S^T M + M S = 0. Scaled to unit Frobenius norm.
inline Matrix lie_element(const GroupForm& f, std::mt19937_64& g)
{
    const std::size_t n = f.n();
    Matrix k(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) k(i, j) = standard_normal(g);
    const Matrix kt = transpose(k);
    k = f.skew() ? 0.5 * (k + kt) : 0.5 * (k - kt);
    // every supported M is orthogonal, so M^{-1} = M^T
    Matrix s = transpose(f.m) * k;
    const double ns = frob_norm(s);
    return ns > 0.0 ? (1.0 / ns) * s : s;
}

} // namespace detail

// (I - S)(I + S)^{-1}; lies in the group whenever S lies in its Lie algebra.
inline Matrix cayley(const Matrix& s)
{
    const Matrix I = Matrix::identity(s.rows());
    return solve_right(I - s, I + s);
}

// Random automorphism G = C D C^{-1}: D has its spectrum on the unit circle at one
// random angle magnitude theta in [0.2 pi, 0.4 pi] (so sign and sqrt are well defined
// and every eigenvalue sits equally far from the imaginary axis), and C is a Cayley
// transform whose scale is tuned until the Frobenius condition number of G reaches
// the target. Each attempt is certified; up to 20 attempts.
inline Matrix random_automorphism(const GenSpec& spec)
{
    if (!(spec.target_cond >= 1.0)) throw Error(Errc::invalid_argument, "target condition must be >= 1");
    if (spec.n < 2) throw Error(Errc::invalid_argument, "generator needs n >= 2");
    const GroupForm form = spec.form();
    const double n = static_cast<double>(spec.n);
    const double lo_band = spec.target_cond / 2.0, hi_band = 5.0 * spec.target_cond;
    // cond_F >= n for any group element, so aim slightly above n when the target is below it
    const double aim = std::max(spec.target_cond, std::min(1.1 * n, hi_band));
    std::mt19937_64 g(spec.seed);

    for (int attempt = 0; attempt < 20; ++attempt) {
        const double theta = (0.2 + 0.2 * detail::unit_uniform(g)) * std::numbers::pi;
        const Matrix d = detail::unit_circle_element(form, theta, g);
        const Matrix s0 = detail::lie_element(form, g);
        auto build = [&](double scale) {
            const Matrix c = cayley(scale * s0);
            return solve_right(c * d, c);
        };
        auto cond_at = [&](double scale, Matrix& out) {
            try {
                out = build(scale);
                return cond_estimate(out);
            } catch (const Error&) {
                return std::numeric_limits<double>::infinity();
            }
        };
        Matrix gm;
        double lo = 0.0, hi = 1e-3;
        double c = cond_at(hi, gm);
        int grow = 0;
        while (c < aim && grow < 80) {
            lo = hi;
            hi *= 1.5;
            c = cond_at(hi, gm);
            ++grow;
        }
        // orthogonal elements have cond_F = n at every scale, so the aim can be out of reach
        const bool reached = c >= aim;
        if (!reached && !(c >= lo_band && c <= hi_band)) continue;
        for (int it = 0; reached && it < 60 && lo > 0.0; ++it) {
            const double mid = 0.5 * (lo + hi);
            Matrix tmp;
            if (cond_at(mid, tmp) < aim)
                lo = mid;
            else
                hi = mid;
        }
        c = cond_at(hi, gm);
        if (!(c >= lo_band && c <= hi_band)) continue;
        if (!(group_residual(gm, form) <= 1e-12)) continue;
        try {
            reference_value(RefKind::sign, gm);
            reference_value(RefKind::sqrt, gm);
        } catch (const Error&) {
            continue;
        }
        return gm;
    }
    throw Error(Errc::generation_failed,
                std::string("could not generate a ") + group_name(spec.kind) + " matrix of size " +
                    std::to_string(spec.n) + " with condition in [" + std::to_string(lo_band) + ", " +
                    std::to_string(hi_band) + "] after 20 attempts");
}

// Entries i.i.d. uniform on [0, 1).
inline Matrix random_direction(std::size_t n, std::size_t m, std::uint64_t seed)
{
    std::mt19937_64 g(seed);
    Matrix e(n, m);
    for (std::size_t i = 0; i < e.size(); ++i) e.data()[i] = detail::unit_uniform(g);
    return e;
}

// Standard normal entries, for test inputs.
inline Matrix random_gaussian(std::size_t n, std::size_t m, std::uint64_t seed)
{
    std::mt19937_64 g(seed);
    Matrix e(n, m);
    for (std::size_t i = 0; i < e.size(); ++i) e.data()[i] = detail::standard_normal(g);
    return e;
}

} // namespace matfun
