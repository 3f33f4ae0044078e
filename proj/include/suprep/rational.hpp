#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

namespace suprep {

using Integer = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

/// Points, claims, densities and generators all live in this type.
using Vector = std::vector<Rational>;

class ParseError : public std::runtime_error
{
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what)
        , line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// ---------------------------------------------------------------------------
// Scalars
// ---------------------------------------------------------------------------

inline std::string to_string(const Rational& r)
{
    return r.str();
}

inline Rational parse_rational(std::string_view text)
{
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
            s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
            s.remove_suffix(1);
        return s;
    };
    text = trim(text);
    auto valid_int = [](std::string_view s, bool allow_sign) {
        if (!s.empty() && allow_sign && (s.front() == '-' || s.front() == '+'))
            s.remove_prefix(1);
        return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
            return std::isdigit(static_cast<unsigned char>(c)) != 0;
        });
    };
    const auto slash = text.find('/');
    std::string_view num = text.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view{"1"} : text.substr(slash + 1);
    if (!valid_int(num, true) || !valid_int(den, false))
        throw ParseError("malformed rational '" + std::string(text) + "'");
    if (num.front() == '+')
        num.remove_prefix(1);
    Integer d(std::string{den});
    if (d == 0)
        throw ParseError("zero denominator in '" + std::string(text) + "'");
    return Rational(Integer(std::string{num}), d);
}

inline std::size_t bit_length(const Integer& v)
{
    return v == 0 ? 0 : boost::multiprecision::msb(boost::multiprecision::abs(v)) + 1;
}

// ---------------------------------------------------------------------------
// Vectors
// ---------------------------------------------------------------------------

inline Vector zeros(std::size_t n)
{
    return Vector(n, Rational(0));
}

inline Vector unit(std::size_t n, std::size_t i, const Rational& value = 1)
{
    Vector v = zeros(n);
    v[i] = value;
    return v;
}

inline bool is_zero(std::span<const Rational> v)
{
    return std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; });
}

inline Rational dot(std::span<const Rational> a, std::span<const Rational> b)
{
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

/// Sum_i w_i a_i b_i, the expectation pairing E_P[ab].
inline Rational weighted_dot(std::span<const Rational> a, std::span<const Rational> b,
                             std::span<const Rational> w)
{
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += w[i] * a[i] * b[i];
    return s;
}

inline Vector hadamard(std::span<const Rational> a, std::span<const Rational> b)
{
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = a[i] * b[i];
    return out;
}

inline Vector operator+(const Vector& a, const Vector& b)
{
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = a[i] + b[i];
    return out;
}

inline Vector operator-(const Vector& a, const Vector& b)
{
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = a[i] - b[i];
    return out;
}

inline Vector operator-(const Vector& a)
{
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = -a[i];
    return out;
}

inline Vector operator*(const Rational& s, const Vector& a)
{
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = s * a[i];
    return out;
}

inline Rational sum(std::span<const Rational> v)
{
    Rational s = 0;
    for (const auto& x : v)
        s += x;
    return s;
}

/// Positive rescaling to coprime integer entries. Direction is preserved, so
/// this is the canonical form for rays.
inline Vector primitive(std::span<const Rational> v)
{
    Integer l = 1;
    for (const auto& x : v)
        if (x != 0)
            l = boost::multiprecision::lcm(l, boost::multiprecision::denominator(x));
    Integer g = 0;
    for (const auto& x : v) {
        if (x == 0)
            continue;
        Integer n = boost::multiprecision::numerator(x) * (l / boost::multiprecision::denominator(x));
        g = boost::multiprecision::gcd(g, n);
    }
    Vector out(v.size());
    if (g == 0)
        return zeros(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = Rational(boost::multiprecision::numerator(v[i]) * (l / boost::multiprecision::denominator(v[i])) / g);
    return out;
}

/// Primitive form with the first nonzero entry positive; canonical for lines.
inline Vector canonical_line(std::span<const Rational> v)
{
    Vector out = primitive(v);
    for (const auto& x : out) {
        if (x == 0)
            continue;
        if (x < 0)
            for (auto& y : out)
                y = -y;
        break;
    }
    return out;
}

inline std::string to_string(std::span<const Rational> v, std::string_view sep = " ")
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += sep;
        out += to_string(v[i]);
    }
    return out;
}

/// Splits on whitespace and commas.
inline Vector parse_vector(std::string_view text)
{
    Vector out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == ','))
            ++i;
        std::size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != ',')
            ++j;
        if (j > i)
            out.push_back(parse_rational(text.substr(i, j - i)));
        i = j;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

/// Dense row-major rational matrix.
class Matrix
{
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, Rational(0)) {}

    static Matrix from_rows(const std::vector<Vector>& rows, std::size_t cols)
    {
        Matrix m(rows.size(), cols);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != cols)
                throw std::invalid_argument("Matrix::from_rows: ragged rows");
            std::copy(rows[i].begin(), rows[i].end(), m.data_.begin() + i * cols);
        }
        return m;
    }

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = 1;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<Rational> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const Rational> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    Vector row_vector(std::size_t i) const { return Vector(row(i).begin(), row(i).end()); }

    Vector column(std::size_t j) const
    {
        Vector c(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            c[i] = (*this)(i, j);
        return c;
    }

    Matrix transpose() const
    {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                t(j, i) = (*this)(i, j);
        return t;
    }

    Vector operator*(std::span<const Rational> x) const
    {
        Vector y(rows_, Rational(0));
        for (std::size_t i = 0; i < rows_; ++i)
            y[i] = dot(row(i), x);
        return y;
    }

    void swap_rows(std::size_t a, std::size_t b)
    {
        if (a != b)
            std::swap_ranges(row(a).begin(), row(a).end(), row(b).begin());
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> data_;
};

struct RrefResult
{
    std::size_t rank = 0;
    Matrix reduced;
    std::vector<std::size_t> pivot_columns;
};

/// Reduced row-echelon form by Gauss-Jordan elimination. Among rows eligible
/// as pivot in a column, the one with the shortest numerator wins.
inline RrefResult rref(Matrix m)
{
    RrefResult out;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t best = m.rows();
        std::size_t best_bits = 0;
        for (std::size_t i = r; i < m.rows(); ++i) {
            if (m(i, c) == 0)
                continue;
            const auto bits = bit_length(boost::multiprecision::numerator(m(i, c)));
            if (best == m.rows() || bits < best_bits) {
                best = i;
                best_bits = bits;
            }
        }
        if (best == m.rows())
            continue;
        m.swap_rows(r, best);
        const Rational inv = 1 / m(r, c);
        for (auto& x : m.row(r))
            x *= inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == r || m(i, c) == 0)
                continue;
            const Rational f = m(i, c);
            for (std::size_t j = c; j < m.cols(); ++j)
                m(i, j) -= f * m(r, j);
        }
        out.pivot_columns.push_back(c);
        ++r;
    }
    out.rank = r;
    out.reduced = std::move(m);
    return out;
}

inline std::size_t rank(const Matrix& m)
{
    return rref(m).rank;
}

inline std::size_t rank(const std::vector<Vector>& vs, std::size_t dim)
{
    return vs.empty() ? 0 : rank(Matrix::from_rows(vs, dim));
}

/// Basis of {x : Mx = 0}, each vector in canonical line form.
inline std::vector<Vector> kernel(const Matrix& m)
{
    const auto r = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : r.pivot_columns)
        is_pivot[c] = true;
    std::vector<Vector> basis;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f])
            continue;
        Vector v = zeros(m.cols());
        v[f] = 1;
        for (std::size_t i = 0; i < r.rank; ++i)
            v[r.pivot_columns[i]] = -r.reduced(i, f);
        basis.push_back(canonical_line(v));
    }
    return basis;
}

/// Kernel of the matrix whose rows are `rows` (dimension `dim`).
inline std::vector<Vector> kernel(const std::vector<Vector>& rows, std::size_t dim)
{
    if (rows.empty()) {
        std::vector<Vector> basis;
        for (std::size_t i = 0; i < dim; ++i)
            basis.push_back(unit(dim, i));
        return basis;
    }
    return kernel(Matrix::from_rows(rows, dim));
}

/// Unique basis of span(vs): the nonzero rows of the rref, made primitive.
inline std::vector<Vector> span_basis(const std::vector<Vector>& vs, std::size_t dim)
{
    if (vs.empty())
        return {};
    const auto r = rref(Matrix::from_rows(vs, dim));
    std::vector<Vector> basis;
    for (std::size_t i = 0; i < r.rank; ++i)
        basis.push_back(primitive(r.reduced.row(i)));
    return basis;
}

inline bool in_span(const Vector& v, const std::vector<Vector>& basis)
{
    if (is_zero(v))
        return true;
    if (basis.empty())
        return false;
    auto rows = basis;
    const auto before = rank(rows, v.size());
    rows.push_back(v);
    return rank(rows, v.size()) == before;
}

/// Annihilator {z : sum_w p_w z_w b_w = 0 for all b in span_basis}. Weights
/// must be strictly positive for the pairing to be nondegenerate.
inline std::vector<Vector> weighted_complement(const std::vector<Vector>& span, std::span<const Rational> weights)
{
    for (const auto& w : weights)
        if (w <= 0)
            throw std::invalid_argument("weighted_complement: nonpositive weight (degenerate pairing)");
    std::vector<Vector> rows;
    rows.reserve(span.size());
    for (const auto& b : span) {
        if (b.size() != weights.size())
            throw std::invalid_argument("weighted_complement: dimension mismatch");
        rows.push_back(hadamard(b, weights));
    }
    return kernel(rows, weights.size());
}

/// Solves the square system M x = b; throws if M is singular.
inline Vector solve_square(const Matrix& m, const Vector& b)
{
    const std::size_t n = m.rows();
    Matrix aug(n, n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            aug(i, j) = m(i, j);
        aug(i, n) = b[i];
    }
    const auto r = rref(std::move(aug));
    if (r.rank < n || r.pivot_columns.back() >= n)
        throw std::domain_error("solve_square: singular system");
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = r.reduced(i, n);
    return x;
}

inline bool lex_less(const Vector& a, const Vector& b)
{
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

inline void sort_unique(std::vector<Vector>& vs)
{
    std::sort(vs.begin(), vs.end(), lex_less);
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
}

} // namespace suprep
