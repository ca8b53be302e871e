#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "matfun/dense.hpp"

namespace matfun {

// Shortest-safe decimal form: 17 significant digits round-trips every double.
inline std::string format_number(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string format_entry(double x) { return format_number(x); }

inline std::string format_entry(const cplx& z)
{
    std::string s = format_number(z.real());
    const double b = z.imag();
    if (b < 0.0 || (b == 0.0 && std::signbit(b)))
        s += format_number(b);
    else
        s += "+" + format_number(b);
    return s + "i";
}

namespace detail {

inline double parse_double(std::string_view tok)
{
    double v = 0.0;
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw Error(Errc::parse_error, "bad number '" + std::string(tok) + "'");
    return v;
}

inline void parse_entry(std::string_view tok, double& out) { out = parse_double(tok); }

// accepts "a", "a+bi", "a-bi", "bi"
inline void parse_entry(std::string_view tok, cplx& out)
{
    if (tok.empty() || tok.back() != 'i') {
        out = cplx(parse_double(tok), 0.0);
        return;
    }
    std::string_view body = tok.substr(0, tok.size() - 1);
    std::size_t split = std::string_view::npos;
    for (std::size_t i = body.size(); i-- > 1;) {
        if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    if (split == std::string_view::npos) {
        out = cplx(0.0, parse_double(body));
        return;
    }
    out = cplx(parse_double(body.substr(0, split)), parse_double(body.substr(split)));
}

} // namespace detail

template<class T>
void write_matrix(std::ostream& os, const DenseMatrix<T>& a)
{
    os << a.rows() << ' ' << a.cols() << '\n';
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (j) os << ' ';
            os << format_entry(a(i, j));
        }
        os << '\n';
    }
}

template<class T>
DenseMatrix<T> read_dense(std::istream& is)
{
    long long r = 0, c = 0;
    if (!(is >> r >> c) || r <= 0 || c <= 0)
        throw Error(Errc::parse_error, "matrix header must be 'rows cols' with positive sizes");
    std::vector<T> data;
    data.reserve(static_cast<std::size_t>(r * c));
    std::string tok;
    for (long long k = 0; k < r * c; ++k) {
        if (!(is >> tok))
            throw Error(Errc::parse_error, "matrix body ended after " + std::to_string(k) + " entries");
        T v{};
        detail::parse_entry(tok, v);
        data.push_back(v);
    }
    if (is >> tok)
        throw Error(Errc::parse_error, "trailing data after matrix body");
    return DenseMatrix<T>(static_cast<std::size_t>(r), static_cast<std::size_t>(c), std::move(data));
}

inline Matrix read_matrix(std::istream& is) { return read_dense<double>(is); }
inline CMatrix read_cmatrix(std::istream& is) { return read_dense<cplx>(is); }

inline Matrix load_matrix(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(Errc::parse_error, "cannot open " + path);
    return read_matrix(in);
}

template<class T>
void save_matrix(const std::string& path, const DenseMatrix<T>& a)
{
    std::ofstream out(path);
    if (!out) throw Error(Errc::parse_error, "cannot write " + path);
    write_matrix(out, a);
}

template<class T>
std::string to_text(const DenseMatrix<T>& a)
{
    std::ostringstream os;
    write_matrix(os, a);
    return os.str();
}

} // namespace matfun
