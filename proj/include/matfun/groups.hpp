#pragma once

#include <string>

#include "matfun/dense.hpp"

namespace matfun {

enum class GroupKind { symplectic, pseudo_orthogonal, perplectic, orthogonal };

inline const char* group_name(GroupKind k)
{
    switch (k) {
    case GroupKind::symplectic: return "symplectic";
    case GroupKind::pseudo_orthogonal: return "pseudo_orthogonal";
    case GroupKind::perplectic: return "perplectic";
    case GroupKind::orthogonal: return "orthogonal";
    }
    return "unknown";
}

inline GroupKind parse_group(const std::string& s)
{
    if (s == "symplectic") return GroupKind::symplectic;
    if (s == "pseudo_orthogonal" || s == "pseudo-orthogonal") return GroupKind::pseudo_orthogonal;
    if (s == "perplectic") return GroupKind::perplectic;
    if (s == "orthogonal") return GroupKind::orthogonal;
    throw Error(Errc::invalid_argument, "unknown group '" + s + "'");
}

// Bilinear form M defining the group { X : X^T M X = M }.
struct GroupForm {
    GroupKind kind = GroupKind::orthogonal;
    std::size_t p = 0; // signature split, pseudo-orthogonal only
    std::size_t q = 0;
    Matrix m;

    std::size_t n() const { return m.rows(); }
    // M^T = -M for the symplectic form, M^T = M otherwise
    bool skew() const { return kind == GroupKind::symplectic; }

    // J = [[0, I], [-I, 0]]
    static GroupForm symplectic(std::size_t n)
    {
        if (n < 2 || n % 2 != 0)
            throw Error(Errc::invalid_argument, "symplectic requires even n");
        GroupForm g;
        g.kind = GroupKind::symplectic;
        g.m = Matrix(n, n);
        const std::size_t h = n / 2;
        for (std::size_t i = 0; i < h; ++i) {
            g.m(i, h + i) = 1.0;
            g.m(h + i, i) = -1.0;
        }
        return g;
    }

    // diag(I_p, -I_q)
    static GroupForm pseudo_orthogonal(std::size_t p, std::size_t q)
    {
        if (p + q < 1)
            throw Error(Errc::invalid_argument, "pseudo-orthogonal form needs p + q >= 1");
        GroupForm g;
        g.kind = GroupKind::pseudo_orthogonal;
        g.p = p;
        g.q = q;
        g.m = Matrix(p + q, p + q);
        for (std::size_t i = 0; i < p + q; ++i) g.m(i, i) = i < p ? 1.0 : -1.0;
        return g;
    }

    // antidiagonal ones
    static GroupForm perplectic(std::size_t n)
    {
        if (n < 1) throw Error(Errc::invalid_argument, "perplectic form needs n >= 1");
        GroupForm g;
        g.kind = GroupKind::perplectic;
        g.m = Matrix(n, n);
        for (std::size_t i = 0; i < n; ++i) g.m(i, n - 1 - i) = 1.0;
        return g;
    }

    static GroupForm orthogonal(std::size_t n)
    {
        if (n < 1) throw Error(Errc::invalid_argument, "orthogonal form needs n >= 1");
        GroupForm g;
        g.kind = GroupKind::orthogonal;
        g.m = Matrix::identity(n);
        return g;
    }

    // the form of a given kind at size n; pseudo-orthogonal splits as p = ceil(n/2)
    static GroupForm make(GroupKind k, std::size_t n)
    {
        switch (k) {
        case GroupKind::symplectic: return symplectic(n);
        case GroupKind::pseudo_orthogonal: return pseudo_orthogonal(n - n / 2, n / 2);
        case GroupKind::perplectic: return perplectic(n);
        case GroupKind::orthogonal: return orthogonal(n);
        }
        throw Error(Errc::invalid_argument, "unknown group kind");
    }
};

// ||X^T M X - M||_F
inline double group_residual(const Matrix& x, const GroupForm& g)
{
    if (!x.square() || x.rows() != g.n())
        throw Error(Errc::shape_mismatch, "group residual needs a square matrix matching the form");
    return frob_norm(transpose(x) * g.m * x - g.m);
}

} // namespace matfun
