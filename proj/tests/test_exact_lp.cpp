#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "suprep/exact_lp.hpp"
#include "suprep/vertex_enum.hpp"
#include "test_support.hpp"

using namespace suprep;
using suprep::testing::ivec;
using suprep::testing::vec;

namespace {

LinearProgram one_var(RowSense sense, long rhs)
{
    LinearProgram lp;
    lp.objective = ivec({1});
    lp.constraint_matrix = Matrix::from_rows({ivec({1})}, 1);
    lp.rhs = ivec({rhs});
    lp.row_sense = {sense};
    lp.variable_bounds = {VarBound::nonneg};
    return lp;
}

} // namespace

TEST_CASE("solve: bounded, unbounded and infeasible one-variable programs")
{
    SECTION("max x s.t. x <= 1")
    {
        const auto out = solve(one_var(RowSense::le, 1));
        REQUIRE(out.status == LPStatus::optimal);
        CHECK(out.value == 1);
        CHECK(*out.dual_point == ivec({1}));
    }
    SECTION("max x with only x >= 0")
    {
        LinearProgram lp;
        lp.objective = ivec({1});
        lp.constraint_matrix = Matrix(0, 1);
        lp.variable_bounds = {VarBound::nonneg};
        const auto out = solve(lp);
        REQUIRE(out.status == LPStatus::unbounded);
        CHECK(*out.certificate == ivec({1}));
    }
    SECTION("x <= -1 with x >= 0")
    {
        const auto lp = one_var(RowSense::le, -1);
        const auto out = solve(lp);
        REQUIRE(out.status == LPStatus::infeasible);
        CHECK(verify_outcome(lp, out));
        CHECK((*out.certificate)[0] > 0);
    }
}

TEST_CASE("solve handles free variables, equalities and >= rows")
{
    // max -x - y  s.t. x + y >= 2, x - y = 0, x free, y >= 0   -> x = y = 1.
    LinearProgram lp;
    lp.objective = ivec({-1, -1});
    lp.constraint_matrix = Matrix::from_rows({ivec({1, 1}), ivec({1, -1})}, 2);
    lp.rhs = ivec({2, 0});
    lp.row_sense = {RowSense::ge, RowSense::eq};
    lp.variable_bounds = {VarBound::free, VarBound::nonneg};
    const auto out = solve(lp);
    REQUIRE(out.status == LPStatus::optimal);
    CHECK(*out.primal_point == ivec({1, 1}));
    CHECK(out.value == -2);
}

TEST_CASE("strong duality is exact on random feasible bounded LPs")
{
    std::mt19937_64 rng(3);
    int optimal = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t m = 1 + rng() % 5, n = 1 + rng() % 5;
        LinearProgram lp;
        lp.objective = suprep::testing::random_vector(rng, n, -5, 5);
        lp.constraint_matrix = Matrix::from_rows(suprep::testing::random_vectors(rng, m, n, -5, 5), n);
        lp.rhs = suprep::testing::random_vector(rng, m, -5, 5, 3);
        for (std::size_t i = 0; i < m; ++i)
            lp.row_sense.push_back(static_cast<RowSense>(rng() % 3));
        for (std::size_t j = 0; j < n; ++j)
            lp.variable_bounds.push_back(rng() % 3 == 0 ? VarBound::free : VarBound::nonneg);
        const auto out = solve(lp);
        CHECK(verify_outcome(lp, out));
        if (out.status == LPStatus::optimal) {
            ++optimal;
            CHECK(dot(lp.objective, *out.primal_point) == dot(lp.rhs, *out.dual_point));
        }
    }
    CHECK(optimal > 20);
}

TEST_CASE("farkas_alternative examples")
{
    const auto i2 = Matrix::identity(2);
    auto alt = farkas_alternative(i2, ivec({1, 1}));
    CHECK(alt.branch == FarkasBranch::primal);
    CHECK(*alt.x == ivec({1, 1}));

    alt = farkas_alternative(i2, ivec({-1, 0}));
    REQUIRE(alt.branch == FarkasBranch::dual);
    CHECK(verify_dual_branch(i2, ivec({-1, 0}), *alt.y));
    CHECK(*alt.y == ivec({-1, 0}));

    const auto row = Matrix::from_rows({ivec({1, -1})}, 2);
    alt = farkas_alternative(row, ivec({0}));
    CHECK(alt.branch == FarkasBranch::primal);
    CHECK(*alt.x == ivec({0, 0}));
}

TEST_CASE("enumerate_vertices examples")
{
    std::vector<AffineConstraint> simplex;
    for (std::size_t i = 0; i < 3; ++i)
        simplex.push_back({unit(3, i, Rational(-1)), 0});
    const std::vector<AffineConstraint> mass{{ivec({1, 1, 1}), 1}};

    CHECK(enumerate_vertices(simplex, mass, 3) ==
          std::vector<Vector>{ivec({0, 0, 1}), ivec({0, 1, 0}), ivec({1, 0, 0})});

    // Martingale condition of the trinomial fixture: q . (1, 0, -1/2) = 0.
    // q1 = q3/2 with either q2 = 0 (q = (1/3, 0, 2/3)) or q1 = q3 = 0.
    auto eqs = mass;
    eqs.push_back({vec({"1", "0", "-1/2"}), 0});
    CHECK(enumerate_vertices(simplex, eqs, 3) == std::vector<Vector>{ivec({0, 1, 0}), vec({"1/3", "0", "2/3"})});

    const std::vector<AffineConstraint> square{
        {ivec({-1, 0}), 0}, {ivec({0, -1}), 0}, {ivec({1, 0}), 1}, {ivec({0, 1}), 1}};
    CHECK(enumerate_vertices(square, {}, 2) ==
          std::vector<Vector>{ivec({0, 0}), ivec({0, 1}), ivec({1, 0}), ivec({1, 1})});

    const std::vector<AffineConstraint> quadrant{{ivec({-1, 0}), 0}, {ivec({0, -1}), 0}};
    CHECK_THROWS_AS(enumerate_vertices(quadrant, {}, 2), NotAPolytope);

    const std::vector<AffineConstraint> empty{{ivec({1}), -1}, {ivec({-1}), 0}};
    CHECK(enumerate_vertices(empty, {}, 1).empty());
}

TEST_CASE("enumerated vertices are extreme and their hull covers random feasible points")
{
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + rng() % 2;
        std::vector<AffineConstraint> cons;
        for (std::size_t i = 0; i < n; ++i) {
            cons.push_back({unit(n, i, Rational(-1)), 0});
            cons.push_back({unit(n, i), 3});
        }
        for (int extra = 0; extra < 3; ++extra)
            cons.push_back({suprep::testing::random_vector(rng, n, -3, 3), suprep::testing::random_rational(rng, 0, 6)});
        const auto verts = enumerate_vertices(cons, {}, n);
        REQUIRE_FALSE(verts.empty()); // the origin is always feasible
        for (const auto& v : verts) {
            std::vector<Vector> tight;
            for (const auto& c : cons) {
                CHECK(dot(c.normal, v) <= c.rhs);
                if (dot(c.normal, v) == c.rhs)
                    tight.push_back(c.normal);
            }
            CHECK(rank(tight, n) == n);
        }
        for (int s = 0; s < 10; ++s) {
            const Vector x = suprep::testing::random_vector(rng, n, 0, 3, 4);
            bool inside = true;
            for (const auto& c : cons)
                inside = inside && dot(c.normal, x) <= c.rhs;
            if (!inside)
                continue;
            // x = sum lambda_v v, sum lambda = 1, lambda >= 0.
            Matrix a(n + 1, verts.size());
            for (std::size_t j = 0; j < verts.size(); ++j) {
                for (std::size_t i = 0; i < n; ++i)
                    a(i, j) = verts[j][i];
                a(n, j) = 1;
            }
            Vector b = x;
            b.push_back(1);
            CHECK(farkas_alternative(a, b).branch == FarkasBranch::primal);
        }
    }
}

TEST_CASE("Farkas exclusivity on random systems")
{
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t m = 1 + rng() % 6, n = 1 + rng() % 6;
        const auto a = Matrix::from_rows(suprep::testing::random_vectors(rng, m, n, -5, 5), n);
        const auto b = suprep::testing::random_vector(rng, m, -5, 5);
        const auto alt = farkas_alternative(a, b);
        CHECK(verify(a, b, alt));
    }
}
