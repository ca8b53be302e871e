#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <type_traits>
#include <vector>

#include "matfun/errors.hpp"

namespace matfun {

using cplx = std::complex<double>;

template<class T> struct is_complex : std::false_type {};
template<class T> struct is_complex<std::complex<T>> : std::true_type {};
template<class T> inline constexpr bool is_complex_v = is_complex<T>::value;

inline double abs2(double x) { return x * x; }
inline double abs2(const cplx& z) { return z.real() * z.real() + z.imag() * z.imag(); }
inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }
inline double conj_if(double x) { return x; }
inline cplx conj_if(const cplx& z) { return std::conj(z); }

// Dense row-major matrix. Entries must be finite on construction.
template<class T>
class DenseMatrix {
public:
    using value_type = T;

    DenseMatrix() = default;

    DenseMatrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill)
    {
        if (!is_finite(fill))
            throw Error(Errc::invalid_argument, "matrix entries must be finite");
    }

    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<T> data)
        : rows_(rows), cols_(cols), data_(std::move(data))
    {
        if (data_.size() != rows_ * cols_)
            throw Error(Errc::shape_mismatch, "entry count does not match rows*cols");
        for (const T& v : data_)
            if (!is_finite(v))
                throw Error(Errc::invalid_argument, "matrix entries must be finite");
    }

    DenseMatrix(std::initializer_list<std::initializer_list<T>> rows)
    {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_)
                throw Error(Errc::shape_mismatch, "ragged initializer");
            for (const T& v : r) {
                if (!is_finite(v))
                    throw Error(Errc::invalid_argument, "matrix entries must be finite");
                data_.push_back(v);
            }
        }
    }

    static DenseMatrix identity(std::size_t n)
    {
        DenseMatrix I(n, n);
        for (std::size_t i = 0; i < n; ++i) I(i, i) = T(1);
        return I;
    }

    static DenseMatrix diag(const std::vector<T>& d)
    {
        DenseMatrix D(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) D(i, i) = d[i];
        return D;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }
    bool square() const noexcept { return rows_ == cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    T* data() noexcept { return data_.data(); }
    const T* data() const noexcept { return data_.data(); }
    T* row(std::size_t i) noexcept { return data_.data() + i * cols_; }
    const T* row(std::size_t i) const noexcept { return data_.data() + i * cols_; }
    const std::vector<T>& values() const noexcept { return data_; }

    bool all_finite() const
    {
        return std::all_of(data_.begin(), data_.end(), [](const T& v) { return is_finite(v); });
    }

    DenseMatrix& operator+=(const DenseMatrix& b)
    {
        check_same(b);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += b.data_[i];
        return *this;
    }
    DenseMatrix& operator-=(const DenseMatrix& b)
    {
        check_same(b);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= b.data_[i];
        return *this;
    }
    template<class S>
    DenseMatrix& operator*=(S s)
    {
        for (T& v : data_) v *= s;
        return *this;
    }

    // this += s * b
    DenseMatrix& axpy(T s, const DenseMatrix& b)
    {
        check_same(b);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * b.data_[i];
        return *this;
    }

    void check_same(const DenseMatrix& b) const
    {
        if (rows_ != b.rows_ || cols_ != b.cols_)
            throw Error(Errc::shape_mismatch, "matrix shapes differ");
    }

    bool operator==(const DenseMatrix& b) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using Matrix = DenseMatrix<double>;
using CMatrix = DenseMatrix<cplx>;

template<class T>
DenseMatrix<T> operator+(DenseMatrix<T> a, const DenseMatrix<T>& b) { return a += b; }
template<class T>
DenseMatrix<T> operator-(DenseMatrix<T> a, const DenseMatrix<T>& b) { return a -= b; }
template<class T>
DenseMatrix<T> operator-(DenseMatrix<T> a) { return a *= -1.0; }
template<class T>
DenseMatrix<T> operator*(double s, DenseMatrix<T> a) { return a *= s; }
template<class T>
DenseMatrix<T> operator*(DenseMatrix<T> a, double s) { return a *= s; }
inline CMatrix operator*(cplx s, CMatrix a) { return a *= s; }

template<class T>
DenseMatrix<T> operator*(const DenseMatrix<T>& a, const DenseMatrix<T>& b)
{
    if (a.cols() != b.rows())
        throw Error(Errc::shape_mismatch, "inner dimensions differ in product");
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    DenseMatrix<T> c(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        T* ci = c.row(i);
        const T* ai = a.row(i);
        for (std::size_t p = 0; p < k; ++p) {
            const T s = ai[p];
            if (s == T{}) continue;
            const T* bp = b.row(p);
            for (std::size_t j = 0; j < n; ++j) ci[j] += s * bp[j];
        }
    }
    return c;
}

template<class T>
DenseMatrix<T> transpose(const DenseMatrix<T>& a)
{
    DenseMatrix<T> t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

// conjugate transpose; plain transpose for real matrices
template<class T>
DenseMatrix<T> adjoint(const DenseMatrix<T>& a)
{
    DenseMatrix<T> t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = conj_if(a(i, j));
    return t;
}

template<class T>
double frob_norm(const DenseMatrix<T>& a)
{
    // scaled sum of squares, safe against overflow for large entries
    double scale = 0.0, ssq = 1.0;
    auto acc = [&](double x) {
        x = std::abs(x);
        if (x == 0.0) return;
        if (scale < x) {
            ssq = 1.0 + ssq * (scale / x) * (scale / x);
            scale = x;
        } else {
            ssq += (x / scale) * (x / scale);
        }
    };
    for (const T& v : a.values()) {
        if constexpr (is_complex_v<T>) {
            acc(v.real());
            acc(v.imag());
        } else {
            acc(v);
        }
    }
    return scale * std::sqrt(ssq);
}

inline Matrix re(const CMatrix& z)
{
    Matrix r(z.rows(), z.cols());
    for (std::size_t i = 0; i < z.size(); ++i) r.data()[i] = z.data()[i].real();
    return r;
}

inline Matrix im(const CMatrix& z)
{
    Matrix r(z.rows(), z.cols());
    for (std::size_t i = 0; i < z.size(); ++i) r.data()[i] = z.data()[i].imag();
    return r;
}

// a + i*h*b
inline CMatrix make_complex(const Matrix& a, const Matrix& b, double h = 1.0)
{
    a.check_same(b);
    CMatrix z(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) z.data()[i] = cplx(a.data()[i], h * b.data()[i]);
    return z;
}

inline CMatrix to_complex(const Matrix& a)
{
    CMatrix z(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) z.data()[i] = a.data()[i];
    return z;
}

template<class T>
DenseMatrix<T> block(const DenseMatrix<T>& a, std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc)
{
    if (r0 + nr > a.rows() || c0 + nc > a.cols())
        throw Error(Errc::shape_mismatch, "block out of range");
    DenseMatrix<T> b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j) b(i, j) = a(r0 + i, c0 + j);
    return b;
}

template<class T>
void set_block(DenseMatrix<T>& a, std::size_t r0, std::size_t c0, const DenseMatrix<T>& b)
{
    if (r0 + b.rows() > a.rows() || c0 + b.cols() > a.cols())
        throw Error(Errc::shape_mismatch, "block out of range");
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) a(r0 + i, c0 + j) = b(i, j);
}

template<class T>
DenseMatrix<T> commutator(const DenseMatrix<T>& a, const DenseMatrix<T>& b)
{
    return a * b - b * a;
}

template<class T>
double rel_diff(const DenseMatrix<T>& a, const DenseMatrix<T>& b)
{
    const double nb = frob_norm(b);
    const double d = frob_norm(a - b);
    return nb > 0.0 ? d / nb : d;
}

} // namespace matfun
