#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "suprep/cone.hpp"
#include "suprep/exact_lp.hpp"
#include "suprep/measures.hpp"

namespace suprep {

/// A_X(C) = {x : X - x in s_E(C)} failed the "nonempty and bounded below"
/// requirement.
class PricingError : public std::runtime_error
{
public:
    enum class Kind { empty, unbounded };

    PricingError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

struct UmbrellaPrice
{
    Rational price;
    Vector dominating;  // element of C with X <= price + dominating
    Vector multipliers; // LP duals: a probability vector separating C
    LPOutcome outcome;
};

/// pi(X; C) = inf{x : X - x 1 in C - E+}. The LP minimizes x over x free and
/// lambda >= 0 subject to X - x 1 <= sum_j lambda_j g_j for the generators g_j
/// of C.
inline UmbrellaPrice umbrella_price_detail(const Vector& x, const Cone& c)
{
    const std::size_t n = c.dim();
    if (x.size() != n)
        throw std::invalid_argument("umbrella_price: claim dimension differs from cone dimension");
    const std::vector<Vector> gens = ensure_generators(c).generators();
    LinearProgram lp;
    lp.objective = zeros(1 + gens.size());
    lp.objective[0] = -1;
    lp.constraint_matrix = Matrix(n, 1 + gens.size());
    for (std::size_t i = 0; i < n; ++i) {
        lp.constraint_matrix(i, 0) = -1;
        for (std::size_t j = 0; j < gens.size(); ++j)
            lp.constraint_matrix(i, 1 + j) = -gens[j][i];
    }
    lp.rhs = -x;
    lp.row_sense.assign(n, RowSense::le);
    lp.variable_bounds.assign(1 + gens.size(), VarBound::nonneg);
    lp.variable_bounds[0] = VarBound::free;

    UmbrellaPrice out;
    out.outcome = solve(lp);
    if (out.outcome.status == LPStatus::infeasible)
        throw PricingError(PricingError::Kind::empty, "A_X(C) empty");
    if (out.outcome.status == LPStatus::unbounded)
        throw PricingError(PricingError::Kind::unbounded, "A_X(C) unbounded");
    const Vector& sol = *out.outcome.primal_point;
    out.price = sol[0];
    out.dominating = zeros(n);
    for (std::size_t j = 0; j < gens.size(); ++j)
        if (sol[1 + j] != 0)
            out.dominating = out.dominating + sol[1 + j] * gens[j];
    out.multipliers = *out.outcome.dual_point;
    return out;
}

inline Rational umbrella_price(const Vector& x, const Cone& c)
{
    return umbrella_price_detail(x, c).price;
}

/// The same price with the constraint X - x <= g imposed on `support` only.
inline Rational umbrella_price(const Vector& x, const Cone& c, const std::vector<std::size_t>& support)
{
    if (x.size() != c.dim())
        throw std::invalid_argument("umbrella_price: claim dimension differs from cone dimension");
    Vector xs;
    std::vector<Vector> gs;
    for (auto i : support)
        xs.push_back(x[i]);
    const std::vector<Vector> all = ensure_generators(c).generators();
    for (const auto& g : all) {
        Vector r;
        for (auto i : support)
            r.push_back(g[i]);
        gs.push_back(r);
    }
    return umbrella_price(xs, cone_from_generators(gs, support.size()));
}

// ---------------------------------------------------------------------------
// Dual side
// ---------------------------------------------------------------------------

enum class AttainedIn { m_phi, m_hat_phi_only, m1_only };

inline std::string to_string(AttainedIn a)
{
    switch (a) {
    case AttainedIn::m_phi:
        return "M_Φ";
    case AttainedIn::m_hat_phi_only:
        return "M̂_Φ only";
    case AttainedIn::m1_only:
        return "M₁";
    }
    return "?";
}

struct DualPrice
{
    Rational value;
    Measure witness;   // lexicographically first maximizing closure vertex
    Measure attaining; // barycenter of the maximizing closure vertices
    bool attained = false;
    AttainedIn attained_in = AttainedIn::m1_only;
};

/// sup_{Q in M} E_Q[X] as a maximum over the vertices of the closure of M.
/// The maximizers form a face of the closure; its barycenter has the largest
/// support on that face, so the sup is attained in M iff the barycenter is in
/// M (M is either a polytope or a support-defined subset of one).
inline DualPrice dual_price(const Vector& x, const MeasureFamily& fam)
{
    if (fam.empty())
        throw EmptyFamily(empty_family_message);
    if (x.size() != fam.space().size())
        throw std::invalid_argument("dual_price: claim dimension differs from atom count");
    DualPrice out;
    std::vector<Measure> best;
    for (const auto& q : fam.closure_vertices) {
        const Rational v = dot(q, x);
        if (best.empty() || v > out.value) {
            out.value = v;
            best = {q};
        } else if (v == out.value)
            best.push_back(q);
    }
    sort_unique(best);
    out.witness = best.front();
    out.attaining = barycenter(best);
    out.attained = fam.contains(out.attaining);
    if (fam.conjugate) {
        const EntropyClass ent{fam.m1, *fam.conjugate, EntropyKind::finite_entropy};
        const EntropyClass loss{fam.m1, *fam.conjugate, EntropyKind::finite_loss_entropy};
        if (decide_membership(out.attaining, ent))
            out.attained_in = AttainedIn::m_phi;
        else if (decide_membership(out.attaining, loss))
            out.attained_in = AttainedIn::m_hat_phi_only;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cones
// ---------------------------------------------------------------------------

/// c_E(K): the sigma(E, F) closure of s_E(K), F = [R(M)], on supp(P). For a
/// face M of M_1 it must coincide with R(M)^<.
inline Cone build_c_E_K(const Cone& k, const MeasureFamily& fam)
{
    const SupportMap sm(fam.space());
    const Pairing pairing = family_pairing(fam);
    const Cone c = dd_convert(weak_closure(umbrella_hull(restrict_cone(k, sm)), pairing));
    if (fam.face_of_m1) {
        const Cone dual = polar(densities(fam.closure_generators(), fam.space()), pairing.full());
        if (!equal(c, dual))
            throw std::logic_error("build_c_E_K: c_E(K) differs from R(M)^< for a face M");
    }
    return c;
}

/// C_Phi = R(M_Phi)^< = {X : E_Q[X] <= 0 for every vertex Q of M-hat_Phi}, on
/// supp(P). Checked against c_{E_Phi}(K).
inline Cone build_C_Phi(const Cone& k, const MeasureSet& m1, const ConjugateFunction& phi)
{
    const MeasureFamily mphi = family_mphi(m1, phi);
    if (mphi.empty())
        throw EmptyFamily(empty_family_message);
    const SupportMap sm(m1.space);
    const Pairing pairing = family_pairing(mphi);
    const Cone c = dd_convert(polar(densities(mphi.closure_vertices, m1.space), pairing.full()));
    const Cone closure = weak_closure(umbrella_hull(restrict_cone(k, sm)), pairing);
    if (!equal(c, closure))
        throw std::logic_error("build_C_Phi: C_Phi differs from the weak closure of K - E+");
    return c;
}

// ---------------------------------------------------------------------------
// Pricing with duality
// ---------------------------------------------------------------------------

struct PricingProblem
{
    ProbabilitySpace space;
    Cone wedge;
    FamilyKind family = FamilyKind::m1;
    std::optional<ConjugateFunction> conjugate;
    std::vector<Measure> explicit_measures;
    Vector claim;
};

struct PriceResult
{
    Rational price;
    Rational primal_x;
    Vector dominating;       // on supp(P)
    Vector lp_multipliers;   // LP dual certificate, a probability on supp(P)
    DualPrice dual;
    Cone cone;               // the wedge the primal price was taken over
    std::string family_label;
    std::vector<Measure> closure_vertices;
};

struct SymmetricDualityReport
{
    bool i = false, ii = false, iii = false;
    bool consistent() const { return i == ii && ii == iii; }
};

inline MeasureFamily make_family(const PricingProblem& p, const MeasureSet& m1)
{
    auto need_phi = [&] {
        if (!p.conjugate)
            throw std::invalid_argument("this measure family needs a utility");
        return *p.conjugate;
    };
    MeasureFamily fam;
    switch (p.family) {
    case FamilyKind::m1:
        fam = family_m1(m1);
        fam.conjugate = p.conjugate;
        break;
    case FamilyKind::mphi:
        fam = family_mphi(m1, need_phi());
        break;
    case FamilyKind::mhatphi:
        fam = family_mhatphi(m1, need_phi());
        break;
    case FamilyKind::explicit_set:
        fam = family_explicit(m1, p.explicit_measures);
        fam.conjugate = p.conjugate;
        break;
    }
    if (fam.empty())
        throw EmptyFamily(empty_family_message);
    return fam;
}

/// (i) closure of cone(R(M)) = F cap cone(R(M_1)); (ii) R(M)^< = c_E(K);
/// (iii) closure of cone(R(M)) = s_E(K)^<. All on supp(P).
inline SymmetricDualityReport verify_symmetric_duality(const Cone& k, const MeasureFamily& fam)
{
    const ProbabilitySpace& p = fam.space();
    const SupportMap sm(p);
    const std::size_t s = sm.size();
    const Pairing pairing = family_pairing(fam);
    const Cone hull = umbrella_hull(restrict_cone(k, sm));
    const auto gens = densities(fam.closure_generators(), p);
    const Cone closure = cone_from_generators(gens, s);

    SymmetricDualityReport rep;
    rep.i = equal(closure, intersect(linear_span_cone(*pairing.subspace_basis, s),
                                     cone_from_generators(densities(fam.m1.vertices, p), s)));
    rep.ii = equal(polar(gens, pairing.full()), weak_closure(hull, pairing));
    rep.iii = equal(closure, polar(hull, pairing));
    return rep;
}

inline PriceResult price_with_duality(const PricingProblem& p)
{
    if (p.claim.size() != p.space.size())
        throw std::invalid_argument("claim dimension differs from atom count");
    const MeasureSet m1 = separating_polytope(p.space, p.wedge);
    if (m1.empty())
        throw EmptyFamily(empty_family_message);
    const MeasureFamily fam = make_family(p, m1);
    const SupportMap sm(p.space);

    PriceResult r;
    switch (p.family) {
    case FamilyKind::mphi:
        r.cone = build_C_Phi(p.wedge, m1, *p.conjugate);
        break;
    case FamilyKind::mhatphi:
        // C_{Phi-hat} = C_Phi
        r.cone = build_C_Phi(p.wedge, m1, p.conjugate->hat());
        break;
    case FamilyKind::explicit_set:
        if (!fam.face_of_m1 && !verify_symmetric_duality(p.wedge, fam).i)
            throw std::invalid_argument("explicit measure family is not a face of M_1 and fails the duality condition");
        r.cone = build_c_E_K(p.wedge, fam);
        break;
    case FamilyKind::m1:
        r.cone = build_c_E_K(p.wedge, fam);
        break;
    }
    const UmbrellaPrice primal = umbrella_price_detail(sm.restrict(p.claim), r.cone);
    r.dual = dual_price(p.claim, fam);
    if (primal.price != r.dual.value)
        throw std::logic_error("internal error: primal price " + to_string(primal.price) + " differs from dual price " +
                               to_string(r.dual.value));
    r.price = primal.price;
    r.primal_x = primal.price;
    r.dominating = primal.dominating;
    r.lp_multipliers = primal.multipliers;
    r.family_label = fam.label;
    r.closure_vertices = fam.closure_vertices;
    return r;
}

// ---------------------------------------------------------------------------
// Risk measures and the admissible case
// ---------------------------------------------------------------------------

/// rho(X) = inf{m : -X - m 1 in C} for a closed umbrella wedge C.
inline Rational coherent_risk(const Vector& x, const Cone& c)
{
    if (!is_umbrella(c))
        throw std::invalid_argument("coherent_risk: C is not an umbrella wedge");
    return umbrella_price(-x, c);
}

struct AdmissibleTruncationReport
{
    Rational c;                    // X >= -c
    std::vector<Vector> sequence;  // X_n = min(X, n)
    bool in_cadm = true;
    bool monotone = true;
    bool converges = false;
    bool expectations_monotone = true;
    bool cone_identity = false;

    bool holds() const { return in_cadm && monotone && converges && expectations_monotone && cone_identity; }
};

/// X_n = X ∧ n for n = 1 .. max(1, ceil(max X)) lies in C^adm = K^adm - E+,
/// increases to X, and E_Q[X_n] increases to E_Q[X] for every vertex Q of
/// M_1. Also C^adm_Phi equals the weak closure of C^adm.
inline AdmissibleTruncationReport admissible_truncation_check(const Vector& x, const MarketModel& m,
                                                              const ConjugateFunction& phi)
{
    const Cone k = gains_wedge(m, Admissible{});
    if (!contains(k, x))
        throw std::invalid_argument("admissible_truncation_check: X is not in K^adm");
    const MeasureSet m1 = separating_polytope(m, k);
    AdmissibleTruncationReport rep;
    const Rational lo = *std::min_element(x.begin(), x.end());
    const Rational hi = *std::max_element(x.begin(), x.end());
    rep.c = lo < 0 ? Rational(-lo) : Rational(0);
    Integer top = boost::multiprecision::numerator(hi) / boost::multiprecision::denominator(hi);
    if (Rational(top) < hi)
        ++top;
    const long last = std::max<long>(1, top.convert_to<long>());

    const Cone cadm = dd_convert(umbrella_hull(k));
    for (long n = 1; n <= last; ++n) {
        Vector xn = x;
        for (auto& v : xn)
            v = std::min(v, Rational(n));
        rep.in_cadm = rep.in_cadm && contains(cadm, xn);
        if (!rep.sequence.empty())
            for (std::size_t i = 0; i < xn.size(); ++i)
                rep.monotone = rep.monotone && rep.sequence.back()[i] <= xn[i];
        rep.sequence.push_back(std::move(xn));
    }
    rep.converges = rep.sequence.back() == x;
    for (const auto& q : m1.vertices) {
        Rational prev;
        for (std::size_t n = 0; n < rep.sequence.size(); ++n) {
            const Rational e = dot(q, rep.sequence[n]);
            if (n > 0 && e < prev)
                rep.expectations_monotone = false;
            prev = e;
        }
        if (prev != dot(q, x))
            rep.expectations_monotone = false;
    }

    const MeasureFamily mphi = family_mphi(m1, phi);
    if (mphi.empty())
        throw EmptyFamily(empty_family_message);
    const SupportMap sm(m.space);
    std::vector<Vector> gens = sm.restrict(ensure_generators(cadm).generators());
    rep.cone_identity = equal(build_C_Phi(k, m1, phi),
                              weak_closure(cone_from_generators(gens, sm.size()), family_pairing(mphi)));
    return rep;
}

/// K ⊆ K_Phi = K - E+ ⊆ C_Phi on supp(P).
inline bool check_wedge_chain(const Cone& k, const MeasureSet& m1, const ConjugateFunction& phi)
{
    const SupportMap sm(m1.space);
    const Cone kr = restrict_cone(k, sm);
    const Cone kphi = umbrella_hull(kr);
    return is_subset(kr, kphi) && is_subset(kphi, build_C_Phi(k, m1, phi));
}

} // namespace suprep
