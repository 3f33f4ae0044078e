#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "suprep/conjugate.hpp"
#include "test_support.hpp"

using namespace suprep;
using suprep::testing::vec;

namespace {

const Decimal tiny("1e-30");

bool close(const Decimal& a, const Decimal& b, const Decimal& tol = tiny)
{
    return boost::multiprecision::abs(a - b) <= tol;
}

std::vector<ConjugateFunction> builtins()
{
    return {ConjugateFunction::exponential(1), ConjugateFunction::exponential(Rational(1, 2)),
            ConjugateFunction::logarithmic(), ConjugateFunction::power(Rational(1, 2)),
            ConjugateFunction::power(Rational(-1))};
}

ConjugateFunction kinked()
{
    // slopes -2, -1, then 3
    return ConjugateFunction::piecewise({{0, 1}, {1, -1}, {2, -2}}, 3);
}

} // namespace

TEST_CASE("conjugate_value examples")
{
    const auto e = conjugate_value(ConjugateFunction::exponential(1), 1);
    REQUIRE(e.exact);
    CHECK(*e.exact == -1);
    const auto l = conjugate_value(ConjugateFunction::logarithmic(), 1);
    CHECK(*l.exact == -1);
    CHECK(conjugate_value(ConjugateFunction::logarithmic(), 0).infinite);
    CHECK_THROWS_AS(conjugate_value(ConjugateFunction::logarithmic(), -1), std::invalid_argument);

    // Phi(0) for the families with a finite value
    CHECK(*conjugate_value(ConjugateFunction::exponential(3), 0).exact == 0);
    CHECK(*conjugate_value(ConjugateFunction::power(Rational(-1)), 0).exact == 0);
    CHECK(conjugate_value(ConjugateFunction::power(Rational(1, 2)), 0).infinite);
    // power p = 1/2 at y = 1: U(1) - 1 = 2 - 1
    CHECK(*conjugate_value(ConjugateFunction::power(Rational(1, 2)), 1).exact == 1);
}

TEST_CASE("family flags")
{
    CHECK(ConjugateFunction::exponential(1).phi_at_zero_finite());
    CHECK_FALSE(ConjugateFunction::exponential(1).asymptotically_linear());
    CHECK_FALSE(ConjugateFunction::logarithmic().phi_at_zero_finite());
    CHECK(ConjugateFunction::logarithmic().asymptotically_linear());
    CHECK(kinked().asymptotically_linear());
    CHECK(kinked().phi_at_zero_finite());
    CHECK(ConjugateFunction::logarithmic().hat().phi_at_zero_finite());
    CHECK_THROWS_AS(ConjugateFunction::power(1), std::invalid_argument);
    CHECK_THROWS_AS(ConjugateFunction::power(0), std::invalid_argument);
    CHECK_THROWS_AS(ConjugateFunction::exponential(0), std::invalid_argument);
    CHECK_THROWS_AS(ConjugateFunction::piecewise({{0, 0}, {1, 1}, {2, 1}}, 0), std::invalid_argument);
}

TEST_CASE("phi_hat examples")
{
    for (const auto& f : builtins())
        CHECK(*phi_hat(f, 1).exact == *conjugate_value(f, 1).exact);
    // log: Phi(1) - l* = -1 - (-1)
    CHECK(*phi_hat(ConjugateFunction::logarithmic(), 0).exact == 0);
    // exp: l* = ln 1 = 0, so the linear branch is flat at Phi(1) = -1
    CHECK(*phi_hat(ConjugateFunction::exponential(1), Rational(1, 2)).exact == -1);
    CHECK(left_derivative_at_one(kinked()) == -2);
}

TEST_CASE("power conjugate matches the stationarity closed form")
{
    // For U = x^p / p: Phi(y) = (1 - p)/p * y^(p/(p-1)).
    using boost::multiprecision::pow;
    for (const Rational& p : {Rational(1, 2), Rational(-1), Rational(-3, 2), Rational(1, 3)}) {
        const auto f = ConjugateFunction::power(p);
        const Decimal pd = to_decimal(p);
        for (const Rational& y : {Rational(1, 7), Rational(1, 2), Rational(3), Rational(40)}) {
            const Decimal expect = (1 - pd) / pd * pow(to_decimal(y), pd / (pd - 1));
            CHECK(close(conjugate_value(f, y).value, expect));
        }
    }
}

TEST_CASE("Fenchel grid bound for built-in families")
{
    // sup over a grid of x of U(x) - x y never exceeds Phi(y), and a fine grid
    // around the maximizer comes close.
    for (const auto& f : builtins()) {
        for (const Rational& y : {Rational(1, 4), Rational(1), Rational(5, 2), Rational(9)}) {
            const Decimal phi = conjugate_value(f, y).value;
            Decimal best = -1e50;
            for (int k = -400; k <= 400; ++k) {
                const Decimal x = f.family == ConjugateFamily::exponential ? Decimal(k) / 40
                                                                           : boost::multiprecision::exp(Decimal(k) / 40);
                const Decimal v = utility_value(f, x) - x * to_decimal(y);
                CHECK(v <= phi + tiny);
                best = std::max(best, v);
            }
            CHECK(close(best, phi, Decimal("1e-3")));
        }
    }
}

TEST_CASE("phi_hat is below Phi, convex, and equal to Phi from 1 on")
{
    std::mt19937_64 rng(17);
    auto families = builtins();
    families.push_back(kinked());
    for (const auto& f : families) {
        const auto h = f.hat();
        for (int t = 0; t < 60; ++t) {
            const Rational y = suprep::testing::random_rational(rng, 0, 6, 9);
            const auto phi = conjugate_value(f, y);
            const auto hat = conjugate_value(h, y);
            CHECK_FALSE(hat.infinite);
            if (!phi.infinite)
                CHECK(hat.value <= phi.value + tiny);
            if (y >= 1)
                CHECK(close(hat.value, phi.value));
            const Rational z = suprep::testing::random_rational(rng, 0, 6, 9);
            const auto mid = conjugate_value(h, (y + z) / 2);
            CHECK(mid.value <= (hat.value + conjugate_value(h, z).value) / 2 + tiny);
        }
    }
}

TEST_CASE("growth_check examples")
{
    CHECK(growth_check(ConjugateFunction::logarithmic(), Rational(1, 2), 2, 1, 2, 64).pass);
    CHECK(growth_check(ConjugateFunction::exponential(1), Rational(1, 2), 2, 4, 4, 64).pass);
    // A steep final slope with tiny constants: Phi+(2y) = 2 * 50 y outgrows
    // alpha Phi+(y) + beta (y + 1) for large y.
    const auto steep = ConjugateFunction::piecewise({{0, 0}, {1, 0}}, 50);
    const auto r = growth_check(steep, 2, 2, Rational(1, 100), Rational(1, 100), 64);
    CHECK_FALSE(r.pass);
    REQUIRE(r.y);
    CHECK(r.lhs > r.rhs);
}

TEST_CASE("truncation_bound_check examples")
{
    const Vector w = vec({"1/3", "1/3", "1/3"});
    const auto log_hat = ConjugateFunction::logarithmic().hat();
    auto f = [&](const Rational& y) { return conjugate_value(log_hat, y); };

    const Vector y = vec({"1/2", "3/2", "1"});
    CHECK(truncation_bound_check(f, y, y, y, std::nullopt, w));
    CHECK(truncation_bound_check(f, y, y, y, Rational(0), w));
    // midpoint measure of the trinomial fixture has density (1/2, 3/2, 1)
    CHECK(truncation_bound_check(f, vec({"0", "0", "0"}), y, y, std::nullopt, w));
    CHECK_THROWS_AS(truncation_bound_check(f, y, vec({"0", "0", "0"}), y, std::nullopt, w), std::invalid_argument);

    std::mt19937_64 rng(29);
    const auto log = ConjugateFunction::logarithmic();
    auto g = [&](const Rational& v) { return conjugate_value(log, v); };
    for (int t = 0; t < 200; ++t) {
        Vector y0(3), yy(3), y1(3);
        for (int i = 0; i < 3; ++i) {
            y0[i] = suprep::testing::random_rational(rng, 0, 2, 5);
            yy[i] = y0[i] + suprep::testing::random_rational(rng, 0, 2, 5);
            y1[i] = yy[i] + suprep::testing::random_rational(rng, 0, 2, 5);
        }
        std::optional<Rational> a;
        if (t % 3)
            a = suprep::testing::random_rational(rng, 0, 5, 4);
        CHECK(truncation_bound_check(g, y0, yy, y1, a, w));
        CHECK(truncation_bound_check(f, y0, yy, y1, a, w));
    }
}

TEST_CASE("conjugate_infinite agrees with conjugate_value")
{
    std::mt19937_64 rng(41);
    auto families = builtins();
    families.push_back(kinked());
    for (const auto& f : families)
        for (const auto& g : {f, f.hat()}) {
            CHECK(conjugate_infinite(g, 0) == conjugate_value(g, 0).infinite);
            for (int t = 0; t < 20; ++t) {
                const Rational y = suprep::testing::random_rational(rng, 0, 8, 5);
                CHECK(conjugate_infinite(g, y) == conjugate_value(g, y).infinite);
            }
        }
    CHECK_THROWS_AS(conjugate_infinite(ConjugateFunction::logarithmic(), -1), std::invalid_argument);
}
