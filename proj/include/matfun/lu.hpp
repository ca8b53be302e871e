#pragma once

#include <limits>
#include <string>
#include <vector>

#include "matfun/dense.hpp"

namespace matfun {

// Which adjoint a polar-type computation uses.
enum class Flavor { transpose, conjugate };

template<class T>
DenseMatrix<T> flavor_adjoint(const DenseMatrix<T>& x, Flavor f)
{
    return f == Flavor::conjugate ? adjoint(x) : transpose(x);
}

// LU factorization with partial pivoting, PA = LU, stored in place.
template<class T>
class LU {
public:
    explicit LU(DenseMatrix<T> a) : lu_(std::move(a))
    {
        if (!lu_.square())
            throw Error(Errc::shape_mismatch, "LU needs a square matrix");
        const std::size_t n = lu_.rows();
        const double eps = std::numeric_limits<double>::epsilon();
        const double thresh = static_cast<double>(n) * eps * frob_norm(lu_);
        piv_.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t p = k;
            double best = std::abs(lu_(k, k));
            for (std::size_t i = k + 1; i < n; ++i) {
                const double v = std::abs(lu_(i, k));
                if (v > best) {
                    best = v;
                    p = i;
                }
            }
            if (!(best > thresh))
                throw Error(Errc::singular_matrix,
                            "singular matrix: pivot " + std::to_string(k) + " below threshold");
            piv_[k] = p;
            if (p != k) {
                T* rk = lu_.row(k);
                T* rp = lu_.row(p);
                for (std::size_t j = 0; j < n; ++j) std::swap(rk[j], rp[j]);
            }
            const T inv = T(1) / lu_(k, k);
            const T* rk = lu_.row(k);
            for (std::size_t i = k + 1; i < n; ++i) {
                T* ri = lu_.row(i);
                const T l = ri[k] * inv;
                ri[k] = l;
                if (l == T{}) continue;
                for (std::size_t j = k + 1; j < n; ++j) ri[j] -= l * rk[j];
            }
        }
    }

    std::size_t n() const { return lu_.rows(); }

    // A X = B
    DenseMatrix<T> solve(DenseMatrix<T> b) const
    {
        const std::size_t n = lu_.rows();
        if (b.rows() != n)
            throw Error(Errc::shape_mismatch, "right-hand side row count differs");
        const std::size_t m = b.cols();
        for (std::size_t k = 0; k < n; ++k)
            if (piv_[k] != k) {
                T* r0 = b.row(k);
                T* r1 = b.row(piv_[k]);
                for (std::size_t j = 0; j < m; ++j) std::swap(r0[j], r1[j]);
            }
        for (std::size_t i = 1; i < n; ++i) {
            T* bi = b.row(i);
            const T* li = lu_.row(i);
            for (std::size_t k = 0; k < i; ++k) {
                const T l = li[k];
                if (l == T{}) continue;
                const T* bk = b.row(k);
                for (std::size_t j = 0; j < m; ++j) bi[j] -= l * bk[j];
            }
        }
        for (std::size_t ii = n; ii-- > 0;) {
            T* bi = b.row(ii);
            const T* ui = lu_.row(ii);
            for (std::size_t k = ii + 1; k < n; ++k) {
                const T u = ui[k];
                if (u == T{}) continue;
                const T* bk = b.row(k);
                for (std::size_t j = 0; j < m; ++j) bi[j] -= u * bk[j];
            }
            const T inv = T(1) / ui[ii];
            for (std::size_t j = 0; j < m; ++j) bi[j] *= inv;
        }
        return b;
    }

    // X A = B, through the factorization of A applied to the transposed system
    DenseMatrix<T> solve_right(const DenseMatrix<T>& b) const
    {
        const std::size_t n = lu_.rows();
        if (b.cols() != n)
            throw Error(Errc::shape_mismatch, "right-hand side column count differs");
        // A^T X^T = B^T with A^T = U^T L^T P
        DenseMatrix<T> y = transpose(b);
        const std::size_t m = y.cols();
        for (std::size_t i = 0; i < n; ++i) {
            T* yi = y.row(i);
            for (std::size_t k = 0; k < i; ++k) {
                const T u = lu_(k, i);
                if (u == T{}) continue;
                const T* yk = y.row(k);
                for (std::size_t j = 0; j < m; ++j) yi[j] -= u * yk[j];
            }
            const T inv = T(1) / lu_(i, i);
            for (std::size_t j = 0; j < m; ++j) yi[j] *= inv;
        }
        for (std::size_t ii = n; ii-- > 0;) {
            T* yi = y.row(ii);
            for (std::size_t k = ii + 1; k < n; ++k) {
                const T l = lu_(k, ii);
                if (l == T{}) continue;
                const T* yk = y.row(k);
                for (std::size_t j = 0; j < m; ++j) yi[j] -= l * yk[j];
            }
        }
        for (std::size_t k = n; k-- > 0;)
            if (piv_[k] != k) {
                T* r0 = y.row(k);
                T* r1 = y.row(piv_[k]);
                for (std::size_t j = 0; j < m; ++j) std::swap(r0[j], r1[j]);
            }
        return transpose(y);
    }

private:
    DenseMatrix<T> lu_;
    std::vector<std::size_t> piv_;
};

template<class T>
DenseMatrix<T> solve_linear(const DenseMatrix<T>& a, const DenseMatrix<T>& b)
{
    if (!a.square()) throw Error(Errc::shape_mismatch, "coefficient matrix must be square");
    if (a.rows() != b.rows()) throw Error(Errc::shape_mismatch, "right-hand side row count differs");
    return LU<T>(a).solve(b);
}

// B A^{-1}
template<class T>
DenseMatrix<T> solve_right(const DenseMatrix<T>& b, const DenseMatrix<T>& a)
{
    if (!a.square()) throw Error(Errc::shape_mismatch, "coefficient matrix must be square");
    return LU<T>(a).solve_right(b);
}

template<class T>
DenseMatrix<T> inverse(const DenseMatrix<T>& a)
{
    return solve_linear(a, DenseMatrix<T>::identity(a.rows()));
}

// (X^T X)^{-1} X^T, or with X^H for the conjugate flavor
template<class T>
DenseMatrix<T> pseudoinverse_apply(const DenseMatrix<T>& x, Flavor f = Flavor::transpose)
{
    if (x.rows() < x.cols())
        throw Error(Errc::shape_mismatch, "pseudoinverse needs rows >= cols");
    const DenseMatrix<T> xt = flavor_adjoint(x, f);
    try {
        return solve_linear(xt * x, xt);
    } catch (const Error& e) {
        if (e.code() == Errc::singular_matrix)
            throw Error(Errc::rank_deficient, "matrix is numerically rank deficient");
        throw;
    }
}

// Frobenius-norm condition estimate ||A||_F ||A^{-1}||_F
template<class T>
double cond_estimate(const DenseMatrix<T>& a)
{
    return frob_norm(a) * frob_norm(inverse(a));
}

} // namespace matfun
