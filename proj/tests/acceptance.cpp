// Acceptance runner: one PASS/FAIL line per criterion with wall time.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "random_market.hpp"
#include "suprep/cli.hpp"
#include "suprep/farkas.hpp"
#include "suprep/pricing.hpp"

using namespace suprep;

namespace {

struct Outcome
{
    bool pass = true;
    std::string detail;
    std::vector<std::string> failures;

    void expect(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            if (failures.size() < 5)
                failures.push_back(what);
        }
    }
};

MarketModel fixture(const std::string& name)
{
    std::ifstream in(std::string(SUPREP_FIXTURE_DIR) + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_market(ss.str());
}

Rational rnd(std::mt19937_64& rng, long lo, long hi, long max_den = 1)
{
    std::uniform_int_distribution<long> num(lo, hi), den(1, max_den);
    return Rational(num(rng)) / Rational(den(rng));
}

Vector rnd_vec(std::mt19937_64& rng, std::size_t n, long lo, long hi, long max_den = 1)
{
    Vector v(n);
    for (auto& x : v)
        x = rnd(rng, lo, hi, max_den);
    return v;
}

const auto log_phi = ConjugateFunction::logarithmic();

// ---------------------------------------------------------------------------
// Random corpus shared by criteria 2, 3 and 6
// ---------------------------------------------------------------------------

struct CorpusEntry
{
    MarketModel market;
    Cone k;
    MeasureSet m1;
};

struct Corpus
{
    std::vector<CorpusEntry> entries;
    std::size_t rejected_cap = 0, rejected_empty = 0;
    std::size_t max_leaves = 0, max_periods = 0, max_vertices = 0, two_asset = 0;
};

const Corpus& corpus()
{
    static const Corpus c = [] {
        Corpus out;
        std::mt19937_64 rng(20240601);
        const suprep::testing::RandomTreeOptions opt; // <= 4 periods, <= 32 leaves, prices n/d with n, d <= 20
        while (out.entries.size() < 200) {
            const std::string text = suprep::testing::random_market_text(rng, opt);
            if (text.empty()) {
                ++out.rejected_cap;
                continue;
            }
            MarketModel m = load_market(text);
            Cone k = gains_wedge(m, Admissible{});
            MeasureSet m1 = separating_polytope(m, k);
            if (family_mphi(m1, log_phi).empty()) {
                ++out.rejected_empty;
                continue;
            }
            out.max_leaves = std::max(out.max_leaves, m.atom_count());
            out.max_periods = std::max(out.max_periods, m.periods);
            out.max_vertices = std::max(out.max_vertices, m1.vertices.size());
            out.two_asset += m.assets > 1;
            out.entries.push_back({std::move(m), std::move(k), std::move(m1)});
        }
        return out;
    }();
    return c;
}

std::string corpus_summary()
{
    const Corpus& c = corpus();
    return std::to_string(c.entries.size()) + " trees, max " + std::to_string(c.max_periods) + " periods, max " +
           std::to_string(c.max_leaves) + " leaves, max " + std::to_string(c.max_vertices) + " M_1 vertices, " +
           std::to_string(c.two_asset) + " with two assets; rejected " + std::to_string(c.rejected_cap) +
           " over caps, " + std::to_string(c.rejected_empty) + " with empty M_Phi";
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

Outcome criterion1()
{
    Outcome o;
    const auto t1 = fixture("t1.market");
    const Vector call{1, 0, 0};
    const Vector witness{Rational(1, 3), 0, Rational(2, 3)};
    for (auto kind : {FamilyKind::m1, FamilyKind::mphi, FamilyKind::mhatphi}) {
        PricingProblem p{t1.space, gains_wedge(t1, Admissible{}), kind, log_phi, {}, call};
        const auto r = price_with_duality(p);
        o.expect(r.price == Rational(1, 3), "primal price");
        o.expect(r.dual.value == Rational(1, 3), "dual price");
        o.expect(r.dual.witness == witness, "dual witness");
        if (kind == FamilyKind::mphi)
            o.expect(to_string(r.dual.attained_in) == "M̂_Φ only", "attainment flag under log");
    }
    o.detail = "price 1/3 under M_1, M_Phi(log), M-hat_Phi; witness (1/3, 0, 2/3)";
    return o;
}

Outcome criterion2()
{
    Outcome o;
    std::mt19937_64 rng(2);
    std::size_t claims = 0;
    for (const auto& e : corpus().entries) {
        const Cone c = build_C_Phi(e.k, e.m1, log_phi);
        const MeasureFamily mphi = family_mphi(e.m1, log_phi);
        const SupportMap sm(e.market.space);
        for (int t = 0; t < 3; ++t) {
            const Vector x = rnd_vec(rng, e.market.atom_count(), -20, 20, 20);
            const Rational primal = umbrella_price(sm.restrict(x), c);
            const Rational dual = dual_price(x, mphi).value;
            o.expect(primal == dual, "primal " + to_string(primal) + " vs dual " + to_string(dual));
            ++claims;
        }
    }
    o.detail = std::to_string(claims) + " claims; " + corpus_summary();
    return o;
}

Outcome criterion3()
{
    Outcome o;
    for (const auto& e : corpus().entries) {
        const auto rep = verify_weakclose(e.m1, log_phi);
        o.expect(rep.a_eq_b && rep.b_eq_c && rep.a_eq_c, "cone identity on " + std::to_string(e.market.atom_count()) +
                                                              "-atom tree");
        o.expect(rep.approximations_ok, "approximating sequence");
    }
    o.detail = std::to_string(corpus().entries.size()) + " trees";
    return o;
}

Cone random_cone(std::mt19937_64& rng, std::size_t n)
{
    const std::size_t count = rng() % (n + 3);
    std::vector<Vector> gens;
    for (std::size_t i = 0; i < count; ++i)
        gens.push_back(rnd_vec(rng, n, -3, 3));
    return cone_from_generators(gens, n);
}

Outcome criterion4()
{
    Outcome o;
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng() % 6;
        Pairing pairing = Pairing::plain(n);
        if (trial % 2) {
            Vector w(n);
            for (auto& x : w)
                x = rnd(rng, 1, 5, 3);
            pairing = Pairing::weighted(w);
        }
        const Cone a = random_cone(rng, n);
        const Cone b = random_cone(rng, n);
        const Cone d = dd_convert(a);
        o.expect(dd_convert(Cone::from_halfspaces(n, d.halfspaces())).generators() == d.generators(),
                 "dd round trip");
        o.expect(equal(polar(a, pairing), polar(polar(polar(a, pairing), pairing), pairing)), "triple polar");
        const Cone ab = sum(a, b);
        o.expect(is_subset(polar(ab, pairing), polar(a, pairing)), "antitonicity");
        o.expect(equal(polar(ab, pairing), intersect(polar(a, pairing), polar(b, pairing))), "union law");
        o.expect(equal(polar(intersect(a, b), pairing), sum(polar(a, pairing), polar(b, pairing))),
                 "intersection law");
    }
    o.detail = "500 cones, dim 1..6, plain and weighted pairings";
    return o;
}

Outcome criterion5()
{
    Outcome o;
    std::mt19937_64 rng(5);
    std::size_t primal = 0, closed_image = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t m = 1 + rng() % 6, n = 1 + rng() % 6;
        Matrix a(m, n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                a(i, j) = rnd(rng, -4, 4);
        const Vector b = rnd_vec(rng, m, -4, 4);
        const auto alt = farkas_alternative(a, b);
        o.expect(alt.x.has_value() != alt.y.has_value(), "exactly one branch");
        o.expect(verify(a, b, alt), "certificate substitution");
        primal += alt.branch == FarkasBranch::primal;
        if (trial % 10 == 0) {
            const auto rep = verify_closed_image_equivalence(a, 10, static_cast<std::uint64_t>(trial));
            o.expect(rep.passed(), "closed image equivalence");
            ++closed_image;
        }
    }
    o.detail = "1000 systems (" + std::to_string(primal) + " primal), closed image on " +
               std::to_string(closed_image) + " matrices";
    return o;
}

Outcome criterion6()
{
    Outcome o;
    for (const auto& e : corpus().entries) {
        const MeasureFamily mhat = family_mhatphi(e.m1, log_phi);
        o.expect(is_face(FaceCandidate{mhat.contains, mhat.closure_vertices}, e.m1, 16), "M-hat_Phi face of M_1");
        o.expect(verify_face_span_identity(family_mphi(e.m1, log_phi)).holds, "[M_Phi] cap M_1 = M-hat_Phi");
    }
    o.detail = std::to_string(corpus().entries.size()) + " trees, log utility";
    return o;
}

Outcome criterion7()
{
    Outcome o;
    std::mt19937_64 rng(7);
    std::size_t claims = 0;
    for (const char* name : {"t1.market", "binomial.market", "two_period.market"}) {
        const auto m = fixture(name);
        const Cone k = gains_wedge(m, Admissible{});
        const SupportMap sm(m.space);
        const std::size_t n = sm.size();
        const Cone c = build_C_Phi(k, separating_polytope(m, k), log_phi);
        const Vector one(n, Rational(1));
        for (int t = 0; t < 200; ++t, ++claims) {
            const Vector x = rnd_vec(rng, n, -10, 10, 7), y = rnd_vec(rng, n, -10, 10, 7);
            const Rational cash = rnd(rng, -5, 5, 7), lambda = rnd(rng, 0, 6, 7);
            Vector higher = x;
            for (auto& v : higher)
                v += rnd(rng, 0, 3, 4);

            const Rational px = umbrella_price(x, c);
            o.expect(umbrella_price(x + cash * one, c) == px + cash, "price cash invariance");
            o.expect(umbrella_price(lambda * x, c) == lambda * px, "price homogeneity");
            o.expect(umbrella_price(x + y, c) <= px + umbrella_price(y, c), "price subadditivity");
            o.expect(umbrella_price(higher, c) >= px, "price monotonicity");

            const Rational rx = coherent_risk(x, c);
            o.expect(coherent_risk(x + cash * one, c) == rx - cash, "risk cash additivity");
            o.expect(coherent_risk(lambda * x, c) == lambda * rx, "risk homogeneity");
            o.expect(coherent_risk(x + y, c) <= rx + coherent_risk(y, c), "risk subadditivity");
            o.expect(coherent_risk(higher, c) <= rx, "risk monotonicity");
        }
    }
    o.detail = std::to_string(claims) + " claims over 3 fixtures";
    return o;
}

Outcome criterion8()
{
    Outcome o;
    const auto r = cli::cmd_verify(std::string(SUPREP_FIXTURE_DIR) + "/t1.market", "log", "all");
    const std::string text = cli::render(r, false);
    o.expect(text.find("not reproducible at desk scale") != std::string::npos, "verify prints the note");
    o.expect(r.exit_code == 0, "verify passes on T1");
    o.detail = "verify states the gap is not reproducible on finite Omega";
    return o;
}

} // namespace

int main()
{
    struct Criterion
    {
        int id;
        double limit;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, 1, criterion1},   {2, 120, criterion2}, {3, 120, criterion3}, {4, 60, criterion4},
        {5, 60, criterion5},  {6, 60, criterion6},  {7, 30, criterion7},  {8, 60, criterion8},
    };
    // The corpus is shared; its construction is reported on its own line and
    // not charged to criterion 2.
    const auto c0 = std::chrono::steady_clock::now();
    corpus();
    const double corpus_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - c0).count();
    std::printf("corpus: %s (%.2f s)\n", corpus_summary().c_str(), corpus_seconds);

    bool all = true;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.failures.push_back(std::string("exception: ") + e.what());
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = s < c.limit;
        const bool ok = o.pass && in_time;
        all = all && ok;
        std::printf("%s criterion %d: %s (%.2f s, limit %.0f s)\n", ok ? "PASS" : "FAIL", c.id, o.detail.c_str(), s,
                    c.limit);
        for (const auto& f : o.failures)
            std::printf("    failed: %s\n", f.c_str());
        if (!in_time)
            std::printf("    over the time limit\n");
    }
    std::fflush(stdout);
    return all ? 0 : 1;
}
