#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "matfun/sylvester.hpp"
#include "test_support.hpp"

using namespace matfun;
using namespace matfun::testing;

namespace {

double sylvester_residual(const Matrix& s, const Matrix& x, const Matrix& c)
{
    return frob_norm(s * x + x * s - c) / frob_norm(c);
}

Matrix central_difference(MatFunc f, const Matrix& a, const Matrix& e, double t)
{
    const RefKind k = ref_kind(f);
    return (1.0 / (2 * t)) * (reference_value(k, a + t * e) - reference_value(k, a - t * e));
}

TEST(Sylvester, IdentityCoefficient)
{
    const Matrix x = solve_sylvester(Matrix::identity(2), Matrix::diag({4.0, 8.0}));
    EXPECT_LT(frob_norm(x - Matrix::diag({2.0, 4.0})), 1e-15);
}

TEST(Sylvester, DiagonalClosedForm)
{
    const Matrix x = solve_sylvester(Matrix::diag({1.0, 2.0}), Matrix(2, 2, 1.0));
    const Matrix expect{{0.5, 1.0 / 3.0}, {1.0 / 3.0, 0.25}};
    EXPECT_LT(frob_norm(x - expect), 1e-15);
}

TEST(Sylvester, RandomSpdResidual)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Matrix s = random_spd(5, seed);
        const Matrix c = random_gaussian(5, 5, seed + 50);
        EXPECT_LT(sylvester_residual(s, solve_sylvester(s, c), c), 1e-11);
    }
}

TEST(Sylvester, NonsymmetricCoefficient)
{
    const Matrix s = random_gaussian(12, 12, 3) + 6.0 * Matrix::identity(12);
    const Matrix c = random_gaussian(12, 12, 4);
    EXPECT_LT(sylvester_residual(s, solve_sylvester(s, c), c), 1e-11);
}

TEST(Sylvester, ComplexCoefficient)
{
    const CMatrix s = make_complex(random_spd(4, 5), random_gaussian(4, 4, 6));
    const CMatrix c = make_complex(random_gaussian(4, 4, 7), random_gaussian(4, 4, 8));
    const CMatrix x = solve_sylvester(s, c);
    EXPECT_LT(frob_norm(s * x + x * s - c) / frob_norm(c), 1e-11);
}

TEST(Sylvester, SharedSpectrumIsSingular)
{
    try {
        solve_sylvester(Matrix::diag({1.0, -1.0}), Matrix::identity(2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::singular_matrix);
    }
}

TEST(Sylvester, SizeCap)
{
    try {
        solve_sylvester(Matrix::identity(61), Matrix::identity(61));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::invalid_argument);
    }
    EXPECT_THROW(solve_sylvester(Matrix::identity(3), Matrix::identity(2)), Error);
}

TEST(ReferenceValue, Examples)
{
    EXPECT_LT(frob_norm(reference_value(RefKind::sign, Matrix::diag({3.0, -5.0})) - Matrix::diag({1.0, -1.0})), 1e-14);
    EXPECT_LT(frob_norm(reference_value(RefKind::sqrt, Matrix::diag({4.0, 9.0})) - Matrix::diag({2.0, 3.0})), 1e-14);
    EXPECT_LT(frob_norm(reference_value(RefKind::invsqrt, Matrix::diag({4.0, 9.0})) - Matrix::diag({0.5, 1.0 / 3.0})),
              1e-14);
    EXPECT_LT(frob_norm(reference_value(RefKind::polar, 2.0 * rotation(0.3)) - rotation(0.3)), 1e-14);
}

TEST(ReferenceValue, CertifiedResiduals)
{
    std::mt19937_64 g(11);
    const auto sg = spectral_instance(generic_spectrum(15, false, g), 11);
    const Matrix s = reference_value(RefKind::sign, sg.a);
    EXPECT_LE(frob_norm(s * s - Matrix::identity(15)), 1e-12 * frob_norm(s) * frob_norm(s));
    const Matrix a = random_spd(15, 12);
    const Matrix r = reference_value(RefKind::sqrt, a);
    EXPECT_LE(frob_norm(r * r - a), 1e-12 * frob_norm(a));
    const Matrix q = reference_value(RefKind::polar, random_gaussian(15, 9, 13));
    EXPECT_LE(frob_norm(transpose(q) * q - Matrix::identity(9)), 1e-12);
}

TEST(ReferenceValue, FailsOnImaginaryAxisSpectrum)
{
    EXPECT_THROW(reference_value(RefKind::sign, Matrix{{0.0, -1.0}, {1.0, 0.0}}), Error);
}

TEST(ReferenceValue, RankDeficientPolar)
{
    try {
        reference_value(RefKind::polar, Matrix(3, 2, 1.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::rank_deficient);
    }
}

TEST(FrechetDirect, Examples)
{
    const Matrix I = Matrix::identity(2);
    EXPECT_LT(frob_norm(frechet_direct(MatFunc::sqrt, 4.0 * I, I) - 0.25 * I), 1e-15);

    const Matrix swap{{0.0, 1.0}, {1.0, 0.0}};
    EXPECT_LT(frob_norm(frechet_direct(MatFunc::sign, Matrix::diag({1.0, -1.0}), swap) - swap), 1e-14);

    EXPECT_LT(frob_norm(frechet_direct(MatFunc::sign, I, random_gaussian(2, 2, 1))), 1e-14);

    const Matrix sym{{1.0, 2.0}, {2.0, -3.0}};
    const Matrix skew{{0.0, 0.7}, {-0.7, 0.0}};
    EXPECT_LT(frob_norm(frechet_direct(MatFunc::polar, I, sym)), 1e-14);
    EXPECT_LT(frob_norm(frechet_direct(MatFunc::polar, I, skew) - skew), 1e-14);
}

TEST(FrechetDirect, PolarAtIdentityMatchesCentralDifference)
{
    const Matrix I = Matrix::identity(2);
    const Matrix skew{{0.0, 0.7}, {-0.7, 0.0}};
    const double t = 1e-4;
    const Matrix fd = (1.0 / (2 * t)) * (reference_value(RefKind::polar, I + t * skew) -
                                         reference_value(RefKind::polar, I - t * skew));
    EXPECT_LT(frob_norm(fd - skew), 1e-7);
}

TEST(FrechetDirect, ShapeMismatch)
{
    EXPECT_THROW(frechet_direct(MatFunc::sqrt, Matrix::identity(3), Matrix::identity(2)), Error);
    EXPECT_THROW(frechet_direct(MatFunc::sign, Matrix(3, 2, 1.0), Matrix(3, 2, 1.0)), Error);
    EXPECT_THROW(frechet_direct(MatFunc::polar, Matrix(2, 3, 1.0), Matrix(2, 3, 1.0)), Error);
}

TEST(FrechetDirect, Linearity)
{
    std::mt19937_64 g(21);
    for (std::size_t n = 4; n <= 10; n += 2) {
        const Matrix a_sign = spectral_instance(generic_spectrum(n, false, g), n).a;
        const Matrix a_sqrt = spectral_instance(generic_spectrum(n, true, g), n + 1).a;
        const Matrix a_pol = random_gaussian(n + 2, n, n + 2);
        const double alpha = 0.7, beta = -1.9;
        for (auto [f, a] : {std::pair{MatFunc::sign, a_sign}, std::pair{MatFunc::sqrt, a_sqrt}, std::pair{MatFunc::polar, a_pol}}) {
            const Matrix e1 = random_gaussian(a.rows(), a.cols(), 100 + n);
            const Matrix e2 = random_gaussian(a.rows(), a.cols(), 200 + n);
            const Matrix lhs = frechet_direct(f, a, alpha * e1 + beta * e2);
            const Matrix rhs = alpha * frechet_direct(f, a, e1) + beta * frechet_direct(f, a, e2);
            EXPECT_LT(rel_diff(lhs, rhs), 1e-10) << func_name(f) << " n=" << n;
        }
    }
}

TEST(FrechetDirect, CentralDifferenceSecondOrder)
{
    std::mt19937_64 g(31);
    const Matrix a_sign = spectral_instance(generic_spectrum(6, false, g), 31).a;
    const Matrix a_sqrt = spectral_instance(generic_spectrum(6, true, g), 32).a;
    const Matrix a_pol = random_gaussian(7, 5, 33);
    for (auto [f, a] : {std::pair{MatFunc::sign, a_sign}, std::pair{MatFunc::sqrt, a_sqrt}, std::pair{MatFunc::polar, a_pol}}) {
        const Matrix e = random_gaussian(a.rows(), a.cols(), 34);
        const Matrix l = frechet_direct(f, a, e);
        const double e3 = frob_norm(l - central_difference(f, a, e, 1e-3)) / frob_norm(l);
        const double e4 = frob_norm(l - central_difference(f, a, e, 1e-4)) / frob_norm(l);
        const double ratio = e3 / e4;
        EXPECT_GE(ratio, 50.0) << func_name(f);
        EXPECT_LE(ratio, 200.0) << func_name(f);
    }
}

TEST(FrechetDirect, DefinitionRemainderVanishes)
{
    std::mt19937_64 g(41);
    const Matrix a = spectral_instance(generic_spectrum(6, true, g), 41).a;
    const Matrix e0 = random_gaussian(6, 6, 42);
    const Matrix f0 = reference_value(RefKind::sqrt, a);
    double prev = std::numeric_limits<double>::infinity();
    for (double t : {1e-1, 1e-2, 1e-3, 1e-4}) {
        const Matrix e = t * e0;
        const double rem =
            frob_norm(reference_value(RefKind::sqrt, a + e) - f0 - frechet_direct(MatFunc::sqrt, a, e)) / frob_norm(e);
        EXPECT_LT(rem, 0.5 * prev) << "t=" << t;
        prev = rem;
    }
}

TEST(FrechetDirect, SignFromInverseSquareRoot)
{
    std::mt19937_64 g(51);
    for (int i = 0; i < 5; ++i) {
        const Matrix a = spectral_instance(generic_spectrum(8, false, g), 51 + i).a;
        const Matrix via_sqrt = a * reference_value(RefKind::invsqrt, a * a);
        EXPECT_LT(frob_norm(reference_value(RefKind::sign, a) - via_sqrt), 1e-10);
    }
}

TEST(FrechetDirect, MatchesDivideDifferenceOracle)
{
    std::mt19937_64 g(61);
    for (int i = 0; i < 5; ++i) {
        const auto sg = spectral_instance(generic_spectrum(7, false, g), 61 + i);
        const auto sq = spectral_instance(generic_spectrum(7, true, g), 71 + i);
        const Matrix e = random_gaussian(7, 7, 81 + i);
        const Matrix l_sign = divided_difference_derivative(sg, sign_of, [](double) { return 0.0; }, e);
        const Matrix l_sqrt = divided_difference_derivative(
            sq, [](double x) { return std::sqrt(x); }, [](double x) { return 0.5 / std::sqrt(x); }, e);
        EXPECT_LT(rel_diff(frechet_direct(MatFunc::sign, sg.a, e), l_sign), 1e-10);
        EXPECT_LT(rel_diff(frechet_direct(MatFunc::sqrt, sq.a, e), l_sqrt), 1e-10);
    }
}

} // namespace
