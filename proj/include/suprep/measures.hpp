#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "suprep/cone.hpp"
#include "suprep/conjugate.hpp"
#include "suprep/market.hpp"
#include "suprep/vertex_enum.hpp"

namespace suprep {

/// A probability measure on the atoms, as a vector of masses.
using Measure = Vector;

class EmptyFamily : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

inline const char* const empty_family_message = "Assumption M_Phi ≠ ∅ violated: the measure family is empty";

/// The coordinates of supp(P). Densities, claims and cones used in duality
/// statements live here; null atoms are quotiented away.
struct SupportMap
{
    std::vector<std::size_t> index;
    std::size_t atoms = 0;
    Vector weights;

    explicit SupportMap(const ProbabilitySpace& s) : index(s.support), atoms(s.size())
    {
        for (auto i : index)
            weights.push_back(s.weights[i]);
    }

    std::size_t size() const { return index.size(); }

    Vector restrict(const Vector& v) const
    {
        if (v.size() != atoms)
            throw std::invalid_argument("support restriction: dimension mismatch");
        Vector out;
        out.reserve(index.size());
        for (auto i : index)
            out.push_back(v[i]);
        return out;
    }

    Vector extend(const Vector& v) const
    {
        Vector out = zeros(atoms);
        for (std::size_t k = 0; k < index.size(); ++k)
            out[index[k]] = v[k];
        return out;
    }

    std::vector<Vector> restrict(const std::vector<Vector>& vs) const
    {
        std::vector<Vector> out;
        for (const auto& v : vs)
            out.push_back(restrict(v));
        return out;
    }
};

/// K seen on supp(P): generators restricted to the support coordinates.
inline Cone restrict_cone(const Cone& k, const SupportMap& s)
{
    const ConeGenerators g = canonical_generators(k);
    return cone_from_generators(s.restrict(detail::flatten(g)), s.size());
}

// ---------------------------------------------------------------------------
// M_1
// ---------------------------------------------------------------------------

/// M_1(P; K) = {Q << P : E_Q[X] <= 0 for X in K}, in atom coordinates.
struct MeasureSet
{
    ProbabilitySpace space;
    Cone wedge;
    std::vector<AffineConstraint> inequalities;
    std::vector<AffineConstraint> equalities;
    std::vector<Measure> vertices;

    bool empty() const { return vertices.empty(); }

    bool contains(const Measure& q) const
    {
        if (q.size() != space.size())
            return false;
        for (const auto& c : inequalities)
            if (dot(c.normal, q) > c.rhs)
                return false;
        for (const auto& c : equalities)
            if (dot(c.normal, q) != c.rhs)
                return false;
        return true;
    }
};

inline MeasureSet separating_polytope(const ProbabilitySpace& space, const Cone& k)
{
    if (k.dim() != space.size())
        throw std::invalid_argument("separating_polytope: wedge dimension differs from atom count");
    const std::size_t n = space.size();
    const SupportMap sm(space);
    const std::size_t s = sm.size();
    const ConeGenerators g = canonical_generators(k);

    MeasureSet out{space, k, {}, {}, {}};
    for (std::size_t i = 0; i < n; ++i)
        out.inequalities.push_back({unit(n, i, Rational(-1)), 0});
    for (const auto& r : g.rays)
        out.inequalities.push_back({r, 0});
    out.equalities.push_back({Vector(n, Rational(1)), 1});
    for (const auto& l : g.lineality)
        out.equalities.push_back({l, 0});
    for (std::size_t i = 0; i < n; ++i)
        if (space.weights[i] == 0)
            out.equalities.push_back({unit(n, i), 0});

    // Enumerate on the support coordinates only.
    std::vector<AffineConstraint> ineq, eq;
    for (std::size_t i = 0; i < s; ++i)
        ineq.push_back({unit(s, i, Rational(-1)), 0});
    for (const auto& r : g.rays)
        ineq.push_back({sm.restrict(r), 0});
    eq.push_back({Vector(s, Rational(1)), 1});
    for (const auto& l : g.lineality)
        eq.push_back({sm.restrict(l), 0});
    for (const auto& v : enumerate_vertices(ineq, eq, s))
        out.vertices.push_back(sm.extend(v));
    sort_unique(out.vertices);
    return out;
}

inline MeasureSet separating_polytope(const MarketModel& m, const Cone& k)
{
    return separating_polytope(m.space, k);
}

// ---------------------------------------------------------------------------
// Densities
// ---------------------------------------------------------------------------

/// dQ/dP on the support coordinates.
inline Vector density(const Measure& q, const ProbabilitySpace& p)
{
    if (q.size() != p.size())
        throw std::invalid_argument("density: dimension mismatch");
    Vector d;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (p.weights[i] == 0) {
            if (q[i] != 0)
                throw std::invalid_argument("density: Q is not absolutely continuous with respect to P");
            continue;
        }
        d.push_back(q[i] / p.weights[i]);
    }
    return d;
}

/// Inverse of `density`: Q({w}) = p_w * d_w.
inline Measure measure_from_density(const Vector& d, const ProbabilitySpace& p)
{
    const SupportMap sm(p);
    if (d.size() != sm.size())
        throw std::invalid_argument("measure_from_density: dimension mismatch");
    return sm.extend(hadamard(d, sm.weights));
}

inline std::vector<Vector> densities(const std::vector<Measure>& qs, const ProbabilitySpace& p)
{
    std::vector<Vector> out;
    for (const auto& q : qs)
        out.push_back(density(q, p));
    return out;
}

/// Basis of F = [R(M)].
inline std::vector<Vector> density_span(const std::vector<Measure>& qs, const ProbabilitySpace& p)
{
    if (qs.empty())
        throw std::invalid_argument("density_span: empty measure set");
    return span_basis(densities(qs, p), SupportMap(p).size());
}

inline Measure barycenter(const std::vector<Measure>& qs)
{
    if (qs.empty())
        throw std::invalid_argument("barycenter: empty set");
    Vector b = zeros(qs[0].size());
    for (const auto& q : qs)
        b = b + q;
    return Rational(1, static_cast<long>(qs.size())) * b;
}

// ---------------------------------------------------------------------------
// Entropy classes
// ---------------------------------------------------------------------------

enum class EntropyKind { finite_entropy, finite_loss_entropy };

struct EntropyClass
{
    MeasureSet base;
    ConjugateFunction conjugate;
    EntropyKind kind = EntropyKind::finite_entropy;
};

/// finite_entropy: Phi(dQ/dP) in L1(P). finite_loss_entropy:
/// Phi+(dQ/dP) 1{dQ/dP >= 1} in L1(P). On finite Omega a sum of finitely many
/// terms is finite iff every term is, so the decision reads the infinity flag
/// of each term.
inline bool decide_membership(const Measure& q, const EntropyClass& cls)
{
    if (!cls.base.contains(q))
        throw std::invalid_argument("decide_membership: Q is not in M_1");
    const Vector d = density(q, cls.base.space);
    for (const auto& y : d) {
        if (cls.kind == EntropyKind::finite_loss_entropy && y < 1)
            continue;
        if (conjugate_infinite(cls.conjugate, y))
            return false;
    }
    return true;
}

/// E_P[Phi(dQ/dP)], informational.
inline ExtendedReal entropy_value(const Measure& q, const ProbabilitySpace& p, const ConjugateFunction& f)
{
    const Vector d = density(q, p);
    const SupportMap sm(p);
    Decimal total = 0;
    for (std::size_t k = 0; k < d.size(); ++k) {
        const auto v = conjugate_value(f, d[k]);
        if (v.infinite)
            return ExtendedReal::infinity();
        total += to_decimal(sm.weights[k]) * v.value;
    }
    return ExtendedReal::approx(total);
}

// ---------------------------------------------------------------------------
// Faces
// ---------------------------------------------------------------------------

struct FaceCandidate
{
    std::function<bool(const Measure&)> contains;
    std::vector<Measure> vertices;
};

namespace detail {

inline Rational random_fraction(std::mt19937_64& rng)
{
    const long den = 2 + static_cast<long>(rng() % 15);
    const long num = 1 + static_cast<long>(rng() % static_cast<std::uint64_t>(den - 1));
    return Rational(num, den);
}

inline Measure random_point(std::mt19937_64& rng, const std::vector<Measure>& vertices)
{
    Vector lambda(vertices.size());
    Rational total = 0;
    for (auto& l : lambda) {
        l = static_cast<long>(rng() % 6);
        total += l;
    }
    if (total == 0) {
        lambda[rng() % lambda.size()] = 1;
        total = 1;
    }
    Vector x = zeros(vertices[0].size());
    for (std::size_t i = 0; i < vertices.size(); ++i)
        if (lambda[i] != 0)
            x = x + (lambda[i] / total) * vertices[i];
    return x;
}

} // namespace detail

/// Face property of `fc` inside the convex set with the given vertices: a
/// strict combination in fc forces both endpoints into fc. Checked on every
/// vertex pair and on random pairs of points.
inline bool is_face(const FaceCandidate& fc, const std::vector<Measure>& vertices, std::size_t samples,
                    std::uint64_t seed = 1)
{
    if (vertices.empty())
        return true;
    std::mt19937_64 rng(seed);
    auto violates = [&](const Measure& x, const Measure& y, const Rational& a) {
        const Measure z = a * x + (1 - a) * y;
        return fc.contains(z) && !(fc.contains(x) && fc.contains(y));
    };
    for (std::size_t i = 0; i < vertices.size(); ++i)
        for (std::size_t j = i + 1; j < vertices.size(); ++j)
            for (const Rational& a : {Rational(1, 2), Rational(1, 3), Rational(2, 3), detail::random_fraction(rng)})
                if (violates(vertices[i], vertices[j], a))
                    return false;
    for (std::size_t t = 0; t < samples; ++t) {
        const Measure x = detail::random_point(rng, vertices);
        const Measure y = detail::random_point(rng, vertices);
        if (violates(x, y, detail::random_fraction(rng)))
            return false;
    }
    return true;
}

inline bool is_face(const FaceCandidate& fc, const MeasureSet& m, std::size_t samples, std::uint64_t seed = 1)
{
    return is_face(fc, m.vertices, samples, seed);
}

// ---------------------------------------------------------------------------
// Measure families used for pricing
// ---------------------------------------------------------------------------

enum class FamilyKind { m1, mphi, mhatphi, explicit_set };

/// A family M of measures inside M_1. `members` are finitely many elements
/// of M whose span is [M]; `closure_vertices` are the vertices of the
/// closure of M; `limit_points` are closure vertices outside M, each the
/// limit of (1 - 1/n) Q1 + (1/n) anchor.
struct MeasureFamily
{
    FamilyKind kind = FamilyKind::m1;
    std::string label;
    MeasureSet m1;
    std::optional<ConjugateFunction> conjugate;
    std::vector<Measure> members;
    std::vector<Measure> closure_vertices;
    std::vector<Measure> limit_points;
    std::optional<Measure> anchor;
    bool face_of_m1 = true;
    std::function<bool(const Measure&)> contains;

    bool empty() const { return members.empty(); }
    const ProbabilitySpace& space() const { return m1.space; }

    /// Members together with limit points: a finite set whose cone has the
    /// same closure as cone(R(M)).
    std::vector<Measure> closure_generators() const
    {
        auto out = members;
        out.insert(out.end(), limit_points.begin(), limit_points.end());
        sort_unique(out);
        return out;
    }
};

inline MeasureFamily family_m1(const MeasureSet& m1)
{
    MeasureFamily f;
    f.kind = FamilyKind::m1;
    f.label = "M_1";
    f.m1 = m1;
    f.members = m1.vertices;
    f.closure_vertices = m1.vertices;
    f.contains = [m1](const Measure& q) { return m1.contains(q); };
    return f;
}

/// M_Phi: members of M_1 with finite entropy. If Phi(0) is finite this is
/// M_1. Otherwise membership means full support on supp(P); the barycenter of
/// the vertices has the largest support in M_1, so M_Phi is empty exactly
/// when the barycenter fails.
inline MeasureFamily family_mphi(const MeasureSet& m1, const ConjugateFunction& phi)
{
    MeasureFamily f;
    f.kind = FamilyKind::mphi;
    f.label = "M_Phi";
    f.m1 = m1;
    f.conjugate = phi;
    const EntropyClass cls{m1, phi, EntropyKind::finite_entropy};
    f.contains = [cls](const Measure& q) { return cls.base.contains(q) && decide_membership(q, cls); };
    if (m1.empty())
        return f;
    const Measure bary = barycenter(m1.vertices);
    if (!decide_membership(bary, cls))
        return f;
    f.anchor = bary;
    f.closure_vertices = m1.vertices;
    f.members.push_back(bary);
    for (const auto& v : m1.vertices) {
        if (decide_membership(v, cls))
            f.members.push_back(v);
        else {
            // pushed towards the barycenter, the midpoint has full support
            f.members.push_back(Rational(1, 2) * (v + bary));
            f.limit_points.push_back(v);
        }
    }
    sort_unique(f.members);
    return f;
}

/// M-hat_Phi: members of M_1 with finite loss-entropy.
inline MeasureFamily family_mhatphi(const MeasureSet& m1, const ConjugateFunction& phi)
{
    MeasureFamily f;
    f.kind = FamilyKind::mhatphi;
    f.label = "M-hat_Phi";
    f.m1 = m1;
    f.conjugate = phi;
    const EntropyClass cls{m1, phi, EntropyKind::finite_loss_entropy};
    f.contains = [cls](const Measure& q) { return cls.base.contains(q) && decide_membership(q, cls); };
    for (const auto& v : m1.vertices)
        if (decide_membership(v, cls))
            f.members.push_back(v);
    f.closure_vertices = f.members;
    // A face of M_1 is spanned by the vertices it contains.
    f.face_of_m1 = is_face(FaceCandidate{f.contains, f.members}, m1, 32);
    return f;
}

/// The convex hull of finitely many measures of M_1.
inline MeasureFamily family_explicit(const MeasureSet& m1, std::vector<Measure> measures, std::string label = "explicit")
{
    for (const auto& q : measures)
        if (!m1.contains(q))
            throw std::invalid_argument("family_explicit: measure outside M_1");
    sort_unique(measures);
    MeasureFamily f;
    f.kind = FamilyKind::explicit_set;
    f.label = std::move(label);
    f.m1 = m1;
    f.members = measures;
    f.closure_vertices = measures;
    f.contains = [measures](const Measure& q) {
        if (measures.empty())
            return false;
        // q = sum lambda_i Q_i, sum lambda = 1, lambda >= 0
        const std::size_t n = q.size();
        Matrix a(n + 1, measures.size());
        for (std::size_t j = 0; j < measures.size(); ++j) {
            for (std::size_t i = 0; i < n; ++i)
                a(i, j) = measures[j][i];
            a(n, j) = 1;
        }
        Vector b = q;
        b.push_back(1);
        return farkas_alternative(a, b).branch == FarkasBranch::primal;
    };
    f.face_of_m1 = !measures.empty() && is_face(FaceCandidate{f.contains, measures}, m1, 32);
    return f;
}

// ---------------------------------------------------------------------------
// Duality checks
// ---------------------------------------------------------------------------

/// Pairing (E, F) on supp(P) with F = [R(M)].
inline Pairing family_pairing(const MeasureFamily& fam)
{
    if (fam.empty())
        throw EmptyFamily(empty_family_message);
    const SupportMap sm(fam.space());
    return Pairing::weighted(sm.weights, density_span(fam.members, fam.space()));
}

struct FaceSpanReport
{
    std::vector<Vector> span;               // basis of [M] as measures
    std::vector<Measure> intersection;      // vertices of [M] cap M_1
    std::vector<Measure> expected;          // vertices of the closure of M
    bool holds = false;
    std::vector<std::string> discrepancies;
};

/// [M] cap M_1 against the closure of M (for M_Phi this is M-hat_Phi).
inline FaceSpanReport verify_face_span_identity(const MeasureFamily& face)
{
    if (face.empty())
        throw EmptyFamily(empty_family_message);
    const MeasureSet& m1 = face.m1;
    const SupportMap sm(m1.space);
    const std::size_t s = sm.size();
    FaceSpanReport rep;
    rep.span = span_basis(face.members, m1.space.size());

    std::vector<AffineConstraint> ineq, eq;
    for (std::size_t i = 0; i < s; ++i)
        ineq.push_back({unit(s, i, Rational(-1)), 0});
    for (const auto& c : m1.inequalities) {
        const Vector r = sm.restrict(c.normal);
        if (!is_zero(r))
            ineq.push_back({r, c.rhs});
    }
    for (const auto& c : m1.equalities) {
        const Vector r = sm.restrict(c.normal);
        if (!is_zero(r))
            eq.push_back({r, c.rhs});
    }
    for (const auto& u : kernel(sm.restrict(rep.span), s))
        eq.push_back({u, 0});
    for (const auto& v : enumerate_vertices(ineq, eq, s))
        rep.intersection.push_back(sm.extend(v));
    sort_unique(rep.intersection);

    rep.expected = face.closure_vertices;
    sort_unique(rep.expected);
    rep.holds = rep.intersection == rep.expected;
    for (const auto& v : rep.intersection)
        if (!std::binary_search(rep.expected.begin(), rep.expected.end(), v, lex_less))
            rep.discrepancies.push_back("vertex " + to_string(v) + " of [M] ∩ M_1 is not in the closure of M");
    for (const auto& v : rep.expected)
        if (!std::binary_search(rep.intersection.begin(), rep.intersection.end(), v, lex_less))
            rep.discrepancies.push_back("closure vertex " + to_string(v) + " is missing from [M] ∩ M_1");
    return rep;
}

struct WeakcloseReport
{
    Cone hat_cone;        // cone(R(M-hat_Phi))
    Cone span_cap_m1;     // F_Phi cap cone(R(M_1))
    Cone bipolar;         // bipolar closure of cone(R(M_Phi))
    bool a_eq_b = false, b_eq_c = false, a_eq_c = false;
    bool approximations_ok = true;
    std::vector<long> approximation_steps;
    std::vector<std::string> notes;

    bool holds() const { return a_eq_b && b_eq_c && a_eq_c && approximations_ok; }
};

/// cone(R(M-hat_Phi)) = F_Phi cap cone(R(M_1)) = cone(R(M_Phi))^<<, and every
/// vertex of M-hat_Phi outside M_Phi is the limit of members of M_Phi.
inline WeakcloseReport verify_weakclose(const MeasureSet& m1, const ConjugateFunction& phi)
{
    const MeasureFamily mphi = family_mphi(m1, phi);
    if (mphi.empty())
        throw EmptyFamily(empty_family_message);
    const MeasureFamily mhat = family_mhatphi(m1, phi);
    const ProbabilitySpace& p = m1.space;
    const std::size_t s = SupportMap(p).size();
    const Pairing pairing = family_pairing(mphi);

    WeakcloseReport rep;
    rep.hat_cone = cone_from_generators(densities(mhat.members, p), s);
    rep.span_cap_m1 = intersect(linear_span_cone(*pairing.subspace_basis, s),
                                cone_from_generators(densities(m1.vertices, p), s));
    // densities live in F; their polar is taken in E and the second polar
    // lands back in F
    const Cone first = polar(densities(mphi.closure_generators(), p), pairing.full());
    rep.bipolar = polar(first, pairing);
    rep.a_eq_b = equal(rep.hat_cone, rep.span_cap_m1);
    rep.b_eq_c = equal(rep.span_cap_m1, rep.bipolar);
    rep.a_eq_c = equal(rep.hat_cone, rep.bipolar);

    rep.approximation_steps = {1, 2, 3, 10, 100, 1000};
    for (const auto& q1 : mphi.limit_points) {
        for (long n : rep.approximation_steps) {
            const Rational t(1, n);
            const Measure qn = (1 - t) * q1 + t * *mphi.anchor;
            if (!mphi.contains(qn))
                rep.approximations_ok = false;
        }
        if (!mhat.contains(q1))
            rep.approximations_ok = false;
    }
    if (phi.phi_at_zero_finite())
        rep.notes.push_back("Phi(0) < ∞, so M_Phi = M-hat_Phi");
    if (phi.asymptotically_linear())
        rep.notes.push_back("Phi is asymptotically linear, so M-hat_Phi = M_1");
    return rep;
}

struct DualUmbrellaReport
{
    Cone polar_of_hull;     // s_E(K)^<
    Cone span_cap_m1;       // F cap cone(R(M_1))
    Cone orthant_cap_polar; // E+ cap K^< cap F
    bool holds = false;
};

/// s_E(K)^< = F cap cone(R(M_1)) = E+ cap K^< under the (E, F) pairing of a
/// family.
inline DualUmbrellaReport verify_dual_umbrella(const MeasureFamily& fam)
{
    const ProbabilitySpace& p = fam.space();
    const SupportMap sm(p);
    const std::size_t s = sm.size();
    const Pairing pairing = family_pairing(fam);
    const Cone k = restrict_cone(fam.m1.wedge, sm);

    DualUmbrellaReport rep;
    rep.polar_of_hull = polar(umbrella_hull(k), pairing);
    rep.span_cap_m1 = intersect(linear_span_cone(*pairing.subspace_basis, s),
                                cone_from_generators(densities(fam.m1.vertices, p), s));
    std::vector<Vector> orthant;
    for (std::size_t i = 0; i < s; ++i)
        orthant.push_back(unit(s, i, Rational(-1)));
    rep.orthant_cap_polar = intersect(Cone::from_halfspaces(s, orthant), polar(k, pairing));
    rep.holds = equal(rep.polar_of_hull, rep.span_cap_m1) && equal(rep.span_cap_m1, rep.orthant_cap_polar);
    return rep;
}

// ---------------------------------------------------------------------------
// Measure text format: "measure: q1 q2 ... qn"
// ---------------------------------------------------------------------------

inline std::string write_measure(const Measure& q)
{
    return "measure: " + to_string(q) + "\n";
}

inline Measure parse_measure(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#')
            continue;
        if (line.compare(first, 8, "measure:") != 0)
            throw ParseError("expected 'measure:'", lineno);
        try {
            return parse_vector(line.substr(first + 8));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), lineno);
        }
    }
    throw ParseError("no 'measure:' line");
}

} // namespace suprep
