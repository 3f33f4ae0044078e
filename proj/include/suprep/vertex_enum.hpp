#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "suprep/double_description.hpp"
#include "suprep/rational.hpp"

namespace suprep {

/// normal . x <= rhs  (or == rhs when used as an equality).
struct AffineConstraint
{
    Vector normal;
    Rational rhs;
};

class NotAPolytope : public std::runtime_error
{
public:
    NotAPolytope() : std::runtime_error("not a polytope") {}
};

/// Vertices of {x : a.x <= b, e.x = f}, lexicographically sorted. The
/// polyhedron is homogenized to {(x, t) : a.x - b t <= 0, e.x - f t = 0, t >= 0}
/// and its extreme rays with t > 0 are the vertices. A ray or line with t = 0
/// on a nonempty polyhedron means it is unbounded. The empty set yields {}.
inline std::vector<Vector> enumerate_vertices(const std::vector<AffineConstraint>& inequalities,
                                              const std::vector<AffineConstraint>& equalities,
                                              std::size_t dim)
{
    auto lift = [dim](const AffineConstraint& c) {
        if (c.normal.size() != dim)
            throw std::invalid_argument("enumerate_vertices: dimension mismatch");
        Vector h(c.normal);
        h.push_back(-c.rhs);
        return h;
    };
    std::vector<Vector> ineq, eq;
    for (const auto& c : inequalities)
        ineq.push_back(lift(c));
    for (const auto& c : equalities)
        eq.push_back(lift(c));
    ineq.push_back(unit(dim + 1, dim, Rational(-1)));

    const ConeGenerators g = halfspaces_to_generators(ineq, eq, dim + 1);
    std::vector<Vector> vertices;
    bool recession = !g.lineality.empty();
    for (const auto& r : g.rays) {
        if (r[dim] == 0) {
            recession = true;
            continue;
        }
        Vector v(r.begin(), r.end() - 1);
        const Rational t = r[dim];
        for (auto& x : v)
            x /= t;
        vertices.push_back(std::move(v));
    }
    if (vertices.empty())
        return {};
    if (recession)
        throw NotAPolytope();
    sort_unique(vertices);
    return vertices;
}

} // namespace suprep
