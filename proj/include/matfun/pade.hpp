#pragma once

#include <optional>
#include <string>

#include "matfun/lu.hpp"

namespace matfun {

// Order l of the diagonal [l/l] rational update. Only 1 and 2 are supported;
// higher orders are numerically fragile in double precision.
class PadeOrder {
public:
    explicit PadeOrder(int ell) : ell_(ell)
    {
        if (ell != 1 && ell != 2)
            throw Error(Errc::unsupported_order,
                        "Pade order " + std::to_string(ell) + " is not supported (use 1 or 2)");
    }
    int ell() const noexcept { return ell_; }
    int convergence_order() const noexcept { return 2 * ell_ + 1; }

private:
    int ell_;
};

enum class Scheme { newton, pade1, pade2 };

inline const char* scheme_name(Scheme s)
{
    switch (s) {
    case Scheme::newton: return "newton";
    case Scheme::pade1: return "pade1";
    case Scheme::pade2: return "pade2";
    }
    return "unknown";
}

inline Scheme parse_scheme(const std::string& s)
{
    if (s == "newton") return Scheme::newton;
    if (s == "pade1") return Scheme::pade1;
    if (s == "pade2") return Scheme::pade2;
    if (s.rfind("pade", 0) == 0) {
        // pade3, pade4, ... are recognised so the error names the real problem
        try {
            PadeOrder(std::stoi(s.substr(4)));
        } catch (const std::logic_error&) {
        }
    }
    throw Error(Errc::invalid_argument, "unknown scheme '" + s + "' (newton, pade1, pade2)");
}

inline std::optional<PadeOrder> scheme_order(Scheme s)
{
    switch (s) {
    case Scheme::newton: return std::nullopt;
    case Scheme::pade1: return PadeOrder(1);
    case Scheme::pade2: return PadeOrder(2);
    }
    return std::nullopt;
}

inline Scheme scheme_for(PadeOrder ord) { return ord.ell() == 1 ? Scheme::pade1 : Scheme::pade2; }

// Numerator and denominator, written directly as polynomials in W (W = X^2,
// Z Y or X^T X):  l=1: 3I + W, I + 3W;  l=2: 5I + 10W + W^2, I + 10W + 5W^2.
template<class T>
DenseMatrix<T> pade_numerator(const DenseMatrix<T>& w, PadeOrder ord)
{
    const auto I = DenseMatrix<T>::identity(w.rows());
    if (ord.ell() == 1) return 3.0 * I + w;
    return 5.0 * I + 10.0 * w + w * w;
}

template<class T>
DenseMatrix<T> pade_denominator(const DenseMatrix<T>& w, PadeOrder ord)
{
    const auto I = DenseMatrix<T>::identity(w.rows());
    if (ord.ell() == 1) return I + 3.0 * w;
    return I + 10.0 * w + 5.0 * (w * w);
}

// Directional derivatives of the two polynomials at W along dW.
template<class T>
DenseMatrix<T> pade_numerator_derivative(const DenseMatrix<T>& w, const DenseMatrix<T>& dw, PadeOrder ord)
{
    if (ord.ell() == 1) return dw;
    return 10.0 * dw + w * dw + dw * w;
}

template<class T>
DenseMatrix<T> pade_denominator_derivative(const DenseMatrix<T>& w, const DenseMatrix<T>& dw, PadeOrder ord)
{
    if (ord.ell() == 1) return 3.0 * dw;
    return 10.0 * dw + 5.0 * (w * dw + dw * w);
}

// r = q(W)^{-1} p(W), keeping the factorization of q for derivative solves.
template<class T>
struct PadeRational {
    DenseMatrix<T> w;
    LU<T> q;
    DenseMatrix<T> r;

    PadeRational(DenseMatrix<T> w_, PadeOrder ord)
        : w(std::move(w_)), q(pade_denominator(w, ord)), r(q.solve(pade_numerator(w, ord)))
    {
    }

    // derivative of r along dW:  q dr = L_p - L_q r
    DenseMatrix<T> derivative(const DenseMatrix<T>& dw, PadeOrder ord) const
    {
        return q.solve(pade_numerator_derivative(w, dw, ord) - pade_denominator_derivative(w, dw, ord) * r);
    }
};

template<class T>
DenseMatrix<T> pade_rational(const DenseMatrix<T>& w, PadeOrder ord)
{
    if (!w.square()) throw Error(Errc::shape_mismatch, "rational argument must be square");
    return PadeRational<T>(w, ord).r;
}

// X r(W): one rational update step
template<class T>
DenseMatrix<T> pade_rational_apply(const DenseMatrix<T>& x, const DenseMatrix<T>& w, PadeOrder ord)
{
    if (x.cols() != w.rows()) throw Error(Errc::shape_mismatch, "X and W are not conformable");
    return x * pade_rational(w, ord);
}

} // namespace matfun
