#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "suprep/double_description.hpp"
#include "suprep/exact_lp.hpp"
#include "suprep/rational.hpp"
#include "suprep/vertex_enum.hpp"

namespace suprep {

/// The bilinear system (E, F): E is all of Q^n, F is the span of
/// `subspace_basis` (all of Q^n when absent), and <z, w> = sum_i p_i z_i w_i.
struct Pairing
{
    Vector weights;
    std::optional<std::vector<Vector>> subspace_basis;

    static Pairing plain(std::size_t dim) { return {Vector(dim, Rational(1)), std::nullopt}; }

    static Pairing weighted(Vector weights, std::optional<std::vector<Vector>> subspace = std::nullopt)
    {
        Pairing p{std::move(weights), std::move(subspace)};
        p.validate();
        return p;
    }

    std::size_t dim() const { return weights.size(); }

    /// Same weights, F taken to be the whole space.
    Pairing full() const { return {weights, std::nullopt}; }

    void validate() const
    {
        for (const auto& w : weights)
            if (w <= 0)
                throw std::invalid_argument("Pairing: weights must be strictly positive");
        if (subspace_basis && rank(*subspace_basis, dim()) != subspace_basis->size())
            throw std::invalid_argument("Pairing: subspace basis is not linearly independent");
    }

    /// N = {z in E : <z, w> = 0 for all w in F}.
    std::vector<Vector> annihilator() const
    {
        if (!subspace_basis)
            return {};
        return weighted_complement(*subspace_basis, weights);
    }
};

/// A polyhedral wedge. `generators` is a V-representation (the cone is their
/// nonnegative hull); `halfspaces` holds normals h of {x : h . x <= 0} with the
/// plain dot product. Both are kept exactly as supplied; `dd_convert` produces
/// the canonical irredundant pair.
class Cone
{
public:
    Cone() = default;

    static Cone from_generators(std::size_t dim, std::vector<Vector> gens)
    {
        Cone c;
        c.dim_ = dim;
        c.generators_ = std::move(gens);
        c.check();
        return c;
    }

    static Cone from_halfspaces(std::size_t dim, std::vector<Vector> hs)
    {
        Cone c;
        c.dim_ = dim;
        c.halfspaces_ = std::move(hs);
        c.check();
        return c;
    }

    static Cone from_both(std::size_t dim, std::vector<Vector> gens, std::vector<Vector> hs)
    {
        Cone c;
        c.dim_ = dim;
        c.generators_ = std::move(gens);
        c.halfspaces_ = std::move(hs);
        c.check();
        return c;
    }

    std::size_t dim() const noexcept { return dim_; }
    bool has_generators() const noexcept { return generators_.has_value(); }
    bool has_halfspaces() const noexcept { return halfspaces_.has_value(); }
    const std::vector<Vector>& generators() const { return generators_.value(); }
    const std::vector<Vector>& halfspaces() const { return halfspaces_.value(); }

    friend bool operator==(const Cone&, const Cone&) = default;

private:
    void check() const
    {
        if (dim_ == 0)
            throw std::invalid_argument("Cone: dimension must be positive");
        auto dims = [this](const std::optional<std::vector<Vector>>& vs) {
            if (vs)
                for (const auto& v : *vs)
                    if (v.size() != dim_)
                        throw std::invalid_argument("Cone: vector dimension mismatch");
        };
        dims(generators_);
        dims(halfspaces_);
    }

    std::size_t dim_ = 0;
    std::optional<std::vector<Vector>> generators_;
    std::optional<std::vector<Vector>> halfspaces_;
};

// ---------------------------------------------------------------------------
// Construction and conversion
// ---------------------------------------------------------------------------

/// cone(vs). Zero vectors are dropped, the rest made primitive and
/// deduplicated; an empty list gives {0}.
inline Cone cone_from_generators(const std::vector<Vector>& vs, std::size_t dim)
{
    std::vector<Vector> gens;
    for (const auto& v : vs) {
        if (v.size() != dim)
            throw std::invalid_argument("cone_from_generators: dimension mismatch");
        if (!is_zero(v))
            gens.push_back(primitive(v));
    }
    sort_unique(gens);
    return Cone::from_generators(dim, std::move(gens));
}

inline Cone cone_from_halfspaces(const std::vector<Vector>& hs, std::size_t dim)
{
    return Cone::from_halfspaces(dim, hs);
}

namespace detail {

inline std::vector<Vector> flatten(const ConeGenerators& g)
{
    std::vector<Vector> out = g.rays;
    for (const auto& l : g.lineality) {
        out.push_back(l);
        out.push_back(-l);
    }
    return out;
}

} // namespace detail

/// Canonical V- and H-representations: extreme rays (orthogonal to the
/// lineality space) followed by +/- a lineality basis; facet normals followed
/// by +/- an equality basis.
inline Cone dd_convert(const Cone& c)
{
    const std::size_t n = c.dim();
    ConeGenerators v;
    if (c.has_halfspaces())
        v = halfspaces_to_generators(c.halfspaces(), {}, n);
    else {
        const ConeGenerators facets = generators_to_halfspaces(c.generators(), n);
        v = halfspaces_to_generators(facets.rays, facets.lineality, n);
    }
    auto gens = detail::flatten(v);
    const ConeGenerators h = generators_to_halfspaces(gens, n);
    return Cone::from_both(n, std::move(gens), detail::flatten(h));
}

inline Cone ensure_generators(const Cone& c)
{
    return c.has_generators() ? c : dd_convert(c);
}

inline Cone ensure_halfspaces(const Cone& c)
{
    return c.has_halfspaces() ? c : dd_convert(c);
}

/// Pointed part and lineality of the canonical V-representation.
inline ConeGenerators canonical_generators(const Cone& c)
{
    if (c.has_halfspaces())
        return halfspaces_to_generators(c.halfspaces(), {}, c.dim());
    const ConeGenerators h = generators_to_halfspaces(c.generators(), c.dim());
    return halfspaces_to_generators(h.rays, h.lineality, c.dim());
}

// ---------------------------------------------------------------------------
// Membership, containment, equality
// ---------------------------------------------------------------------------

/// Is x a nonnegative combination of gens? Decided by an exact LP.
inline bool in_conic_hull(const std::vector<Vector>& gens, const Vector& x)
{
    if (is_zero(x))
        return true;
    if (gens.empty())
        return false;
    Matrix a(x.size(), gens.size());
    for (std::size_t j = 0; j < gens.size(); ++j)
        for (std::size_t i = 0; i < x.size(); ++i)
            a(i, j) = gens[j][i];
    return farkas_alternative(a, x).branch == FarkasBranch::primal;
}

inline bool contains(const Cone& c, const Vector& x)
{
    if (x.size() != c.dim())
        throw std::invalid_argument("contains: dimension mismatch");
    if (c.has_halfspaces()) {
        for (const auto& h : c.halfspaces())
            if (dot(h, x) > 0)
                return false;
        return true;
    }
    return in_conic_hull(c.generators(), x);
}

namespace detail {

/// Do the +/- pairs among the normals cut the cone down to a subspace of
/// small dimension? Then its generators are cheap and containment needs no LP.
inline bool low_dimensional(const Cone& c, std::size_t limit = 12)
{
    const std::size_t n = c.dim();
    if (n <= limit)
        return false;
    std::vector<Vector> hs;
    for (const auto& h : c.halfspaces())
        if (!is_zero(h))
            hs.push_back(primitive(h));
    sort_unique(hs);
    std::vector<Vector> eq;
    for (const auto& h : hs)
        if (std::binary_search(hs.begin(), hs.end(), Vector(-h), lex_less))
            eq.push_back(h);
    return n - rank(eq, n) <= limit;
}

} // namespace detail

/// a subset of b.
inline bool is_subset(const Cone& a, const Cone& b)
{
    if (a.dim() != b.dim())
        throw std::invalid_argument("is_subset: dimension mismatch");
    if (!a.has_generators() && a.has_halfspaces() && b.has_halfspaces() && !detail::low_dimensional(a)) {
        // H(a) inside {h . x <= 0} iff h lies in cone(normals of a).
        for (const auto& h : b.halfspaces())
            if (!in_conic_hull(a.halfspaces(), h))
                return false;
        return true;
    }
    const Cone av = ensure_generators(a);
    for (const auto& g : av.generators())
        if (!contains(b, g))
            return false;
    return true;
}

/// Set equality by mutual containment (representations are not unique).
inline bool equal(const Cone& a, const Cone& b)
{
    return is_subset(a, b) && is_subset(b, a);
}

// ---------------------------------------------------------------------------
// Lattice operations
// ---------------------------------------------------------------------------

inline Cone intersect(const Cone& a, const Cone& b)
{
    if (a.dim() != b.dim())
        throw std::invalid_argument("intersect: dimension mismatch");
    auto hs = ensure_halfspaces(a).halfspaces();
    const auto more = ensure_halfspaces(b).halfspaces();
    hs.insert(hs.end(), more.begin(), more.end());
    return Cone::from_halfspaces(a.dim(), std::move(hs));
}

inline Cone sum(const Cone& a, const Cone& b)
{
    if (a.dim() != b.dim())
        throw std::invalid_argument("sum: dimension mismatch");
    auto gs = ensure_generators(a).generators();
    const auto more = ensure_generators(b).generators();
    gs.insert(gs.end(), more.begin(), more.end());
    return cone_from_generators(gs, a.dim());
}

/// [S] = cone(S) - cone(S), as +/- a basis.
inline Cone linear_span_cone(const std::vector<Vector>& s, std::size_t dim)
{
    std::vector<Vector> gens;
    for (auto& b : span_basis(s, dim)) {
        gens.push_back(b);
        gens.push_back(-b);
    }
    return Cone::from_generators(dim, std::move(gens));
}

/// s_E(K) = K - E_+.
inline Cone umbrella_hull(const Cone& k)
{
    const std::size_t n = k.dim();
    auto gens = ensure_generators(k).generators();
    for (std::size_t i = 0; i < n; ++i)
        gens.push_back(unit(n, i, Rational(-1)));
    return cone_from_generators(gens, n);
}

inline bool is_umbrella(const Cone& c)
{
    for (std::size_t i = 0; i < c.dim(); ++i)
        if (!contains(c, unit(c.dim(), i, Rational(-1))))
            return false;
    return true;
}

// ---------------------------------------------------------------------------
// Polarity
// ---------------------------------------------------------------------------

/// A^< = {w in F : <z, w> <= 0 for all z in A}, returned in H-representation.
inline Cone polar(const std::vector<Vector>& a, const Pairing& pairing)
{
    const std::size_t n = pairing.dim();
    std::vector<Vector> hs;
    for (const auto& z : a) {
        if (z.size() != n)
            throw std::invalid_argument("polar: dimension mismatch");
        if (!is_zero(z))
            hs.push_back(primitive(hadamard(z, pairing.weights)));
    }
    if (pairing.subspace_basis) {
        for (const auto& u : kernel(*pairing.subspace_basis, n)) {
            hs.push_back(u);
            hs.push_back(-u);
        }
    }
    return Cone::from_halfspaces(n, std::move(hs));
}

inline Cone polar(const Cone& a, const Pairing& pairing)
{
    return polar(ensure_generators(a).generators(), pairing);
}

/// A^<< : the first polar lands in F, the second back in E.
inline Cone bipolar_closure(const std::vector<Vector>& a, const Pairing& pairing)
{
    return polar(polar(a, pairing), pairing.full());
}

inline Cone bipolar_closure(const Cone& a, const Pairing& pairing)
{
    return bipolar_closure(ensure_generators(a).generators(), pairing);
}

/// sigma(E, F)-closure of a finitely generated wedge: C + N with N the
/// annihilator of F.
inline Cone weak_closure(const Cone& c, const Pairing& pairing)
{
    auto gens = ensure_generators(c).generators();
    for (const auto& u : pairing.annihilator()) {
        gens.push_back(u);
        gens.push_back(-u);
    }
    return cone_from_generators(gens, c.dim());
}

// ---------------------------------------------------------------------------
// Regression check for cone(S cap T) = cone(S) cap T
// ---------------------------------------------------------------------------

class PreconditionError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// S is read as the convex hull of `s_points`, T is a wedge. Computes
/// cone(conv(S) cap T) from the vertices of the polytope conv(S) cap T and
/// compares with cone(S) cap T.
inline bool check_cone_intersection_law(const std::vector<Vector>& s_points, const Cone& t)
{
    if (s_points.empty())
        throw PreconditionError("precondition violated: S is empty");
    const std::size_t n = t.dim();
    const std::size_t m = s_points.size();
    const auto hs = ensure_halfspaces(t).halfspaces();

    // Work in barycentric coordinates lambda of S.
    std::vector<AffineConstraint> ineqs;
    for (std::size_t j = 0; j < m; ++j)
        ineqs.push_back({unit(m, j, Rational(-1)), Rational(0)});
    for (const auto& h : hs) {
        Vector row(m);
        for (std::size_t j = 0; j < m; ++j)
            row[j] = dot(h, s_points[j]);
        ineqs.push_back({row, Rational(0)});
    }
    std::vector<AffineConstraint> eqs{{Vector(m, Rational(1)), Rational(1)}};
    const auto lambdas = enumerate_vertices(ineqs, eqs, m);
    if (lambdas.empty())
        throw PreconditionError("precondition violated: conv(S) and T do not meet");

    std::vector<Vector> pts;
    for (const auto& l : lambdas) {
        Vector x = zeros(n);
        for (std::size_t j = 0; j < m; ++j)
            if (l[j] != 0)
                x = x + l[j] * s_points[j];
        pts.push_back(x);
    }
    const Cone lhs = cone_from_generators(pts, n);
    const Cone rhs = intersect(cone_from_generators(s_points, n), t);
    return equal(lhs, rhs);
}

// ---------------------------------------------------------------------------
// Text format
//
//   cone dim=<n>
//   V: <r_1> ... <r_n>
//   H: <r_1> ... <r_n>
// ---------------------------------------------------------------------------

inline std::string write_cone(const Cone& c)
{
    std::ostringstream out;
    out << "cone dim=" << c.dim() << '\n';
    if (c.has_generators())
        for (const auto& g : c.generators())
            out << "V: " << to_string(g) << '\n';
    if (c.has_halfspaces())
        for (const auto& h : c.halfspaces())
            out << "H: " << to_string(h) << '\n';
    return out.str();
}

/// Lines starting with '#' and blank lines are ignored. A cone with no V and
/// no H lines is read as {0} in V-form.
inline Cone parse_cone(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    std::optional<std::size_t> dim;
    std::optional<std::vector<Vector>> gens, hs;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#')
            continue;
        line = line.substr(first);
        if (!dim) {
            if (line.rfind("cone dim=", 0) != 0)
                throw ParseError("expected header 'cone dim=<n>'", lineno);
            try {
                dim = std::stoul(line.substr(9));
            } catch (const std::exception&) {
                throw ParseError("bad dimension in header", lineno);
            }
            if (*dim == 0)
                throw ParseError("cone dimension must be positive", lineno);
            continue;
        }
        const bool is_v = line.rfind("V:", 0) == 0;
        const bool is_h = line.rfind("H:", 0) == 0;
        if (!is_v && !is_h)
            throw ParseError("expected 'V:' or 'H:' line", lineno);
        Vector v;
        try {
            v = parse_vector(line.substr(2));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), lineno);
        }
        if (v.size() != *dim)
            throw ParseError("expected " + std::to_string(*dim) + " entries", lineno);
        auto& target = is_v ? gens : hs;
        if (!target)
            target.emplace();
        target->push_back(std::move(v));
    }
    if (!dim)
        throw ParseError("missing 'cone dim=<n>' header");
    if (gens && hs)
        return Cone::from_both(*dim, std::move(*gens), std::move(*hs));
    if (hs)
        return Cone::from_halfspaces(*dim, std::move(*hs));
    return Cone::from_generators(*dim, gens ? std::move(*gens) : std::vector<Vector>{});
}

} // namespace suprep
