#pragma once

// Test-only helpers: matrices with a known eigendecomposition, so function values and
// Fréchet derivatives have closed forms independent of the library's iterations.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "matfun/generate.hpp"

namespace matfun::testing {

struct SpectralInstance {
    Matrix a;
    Matrix v;
    Matrix vinv;
    std::vector<double> lambda;
};

// A = V diag(lambda) V^{-1} with V = I + spread * G / sqrt(n), G standard normal.
inline SpectralInstance spectral_instance(const std::vector<double>& lambda, std::uint64_t seed, double spread = 0.3)
{
    const std::size_t n = lambda.size();
    SpectralInstance s;
    s.lambda = lambda;
    s.v = Matrix::identity(n) + (spread / std::sqrt(double(n))) * random_gaussian(n, n, seed);
    s.vinv = inverse(s.v);
    s.a = s.v * Matrix::diag(lambda) * s.vinv;
    return s;
}

inline Matrix apply_function(const SpectralInstance& s, const std::function<double(double)>& f)
{
    std::vector<double> d;
    for (double l : s.lambda) d.push_back(f(l));
    return s.v * Matrix::diag(d) * s.vinv;
}

// Daleckii-Krein: L_f(A, E) = V (F o (V^{-1} E V)) V^{-1}, F_ij = f[l_i, l_j]
inline Matrix divided_difference_derivative(const SpectralInstance& s, const std::function<double(double)>& f,
                                            const std::function<double(double)>& fp, const Matrix& e)
{
    Matrix m = s.vinv * e * s.v;
    const std::size_t n = s.lambda.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double li = s.lambda[i], lj = s.lambda[j];
            const double dd = std::abs(li - lj) < 1e-12 * (1 + std::abs(li)) ? fp(li) : (f(li) - f(lj)) / (li - lj);
            m(i, j) *= dd;
        }
    return s.v * m * s.vinv;
}

inline double sign_of(double x) { return x > 0 ? 1.0 : -1.0; }

// Spectrum whose Cayley image (sign(l) - l)/(sign(l) + l) has one common modulus rho,
// so every eigen-mode contracts at the same rate; rho in [0.6, 0.8].
inline std::vector<double> uniform_rate_spectrum(std::size_t n, bool for_sqrt, std::mt19937_64& g)
{
    auto u = [&] { return static_cast<double>(g() >> 11) * 0x1.0p-53; };
    const double rho = 0.6 + 0.2 * u();
    const double a = (1.0 - rho) / (1.0 + rho);
    std::vector<double> l;
    for (std::size_t i = 0; i < n; ++i) {
        const double mu = u() < 0.5 ? a : 1.0 / a;
        if (for_sqrt)
            l.push_back(mu * mu);
        else
            l.push_back(u() < 0.5 ? mu : -mu);
    }
    return l;
}

// Spectrum away from the imaginary axis (sign) or from the negative real axis (sqrt).
inline std::vector<double> generic_spectrum(std::size_t n, bool positive, std::mt19937_64& g)
{
    auto u = [&] { return static_cast<double>(g() >> 11) * 0x1.0p-53; };
    std::vector<double> l;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = 0.5 + 2.5 * u();
        l.push_back(positive || u() < 0.5 ? m : -m);
    }
    return l;
}

inline Matrix rotation(double t)
{
    return Matrix{{std::cos(t), -std::sin(t)}, {std::sin(t), std::cos(t)}};
}

inline Matrix random_spd(std::size_t n, std::uint64_t seed)
{
    const Matrix g = random_gaussian(n, n, seed);
    return transpose(g) * g + double(n) * Matrix::identity(n);
}

} // namespace matfun::testing
