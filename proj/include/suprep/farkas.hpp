#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "suprep/cone.hpp"
#include "suprep/exact_lp.hpp"

namespace suprep {

struct ClosedImageFailure
{
    Vector b;
    bool primal_ok = false;
    bool dual_ok = false;
    bool in_image = false;
};

struct ClosedImageReport
{
    std::size_t trials = 0;
    std::size_t primal_count = 0;
    std::size_t dual_count = 0;
    Cone image;  // cone of the columns of A
    Cone g;      // polar of {y : A^T y <= 0}
    bool image_equals_g = false;
    std::vector<ClosedImageFailure> failures;

    bool passed() const { return image_equals_g && failures.empty(); }
};

/// For random b, the Farkas alternative must hold exclusively, and the branch
/// must agree with membership of b in A(E+). A(E+) is also compared with
/// G = {y : A^T y <= 0}^<, computed through the cone routines.
inline ClosedImageReport verify_closed_image_equivalence(const Matrix& a, std::size_t trials, std::uint64_t seed)
{
    if (trials == 0)
        throw std::invalid_argument("verify_closed_image_equivalence: trials must be positive");
    const std::size_t m = a.rows();
    std::vector<Vector> columns;
    for (std::size_t j = 0; j < a.cols(); ++j)
        columns.push_back(a.column(j));

    ClosedImageReport rep;
    rep.trials = trials;
    rep.image = dd_convert(cone_from_generators(columns, m));
    rep.g = dd_convert(polar(Cone::from_halfspaces(m, columns), Pairing::plain(m)));
    rep.image_equals_g = equal(rep.image, rep.g);

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> entry(-5, 5);
    for (std::size_t t = 0; t < trials; ++t) {
        Vector b(m);
        for (auto& x : b)
            x = entry(rng);
        const FarkasAlternative alt = farkas_alternative(a, b);
        const bool primal_ok = alt.x && verify_primal_branch(a, b, *alt.x);
        const bool dual_ok = alt.y && verify_dual_branch(a, b, *alt.y);
        const bool in_image = contains(rep.image, b);
        if (alt.branch == FarkasBranch::primal)
            ++rep.primal_count;
        else
            ++rep.dual_count;
        const bool branch_ok = alt.branch == FarkasBranch::primal ? primal_ok && !alt.y : dual_ok && !alt.x;
        if (!branch_ok || in_image != (alt.branch == FarkasBranch::primal))
            rep.failures.push_back({b, primal_ok, dual_ok, in_image});
    }
    return rep;
}

} // namespace suprep
