#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "suprep/rational.hpp"

namespace suprep {

/// V-representation split into its pointed part and its lineality space.
/// Rays are orthogonal (plain dot product) to the lineality space, primitive
/// and sorted; the lineality basis is the primitive rref basis. Both are
/// therefore unique for a given cone.
struct ConeGenerators
{
    std::vector<Vector> rays;
    std::vector<Vector> lineality;
};

namespace detail {

using IntVec = std::vector<Integer>;

class Bits
{
public:
    Bits() = default;
    explicit Bits(std::size_t n) : words_((n + 63) / 64, 0) {}

    void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }

    void grow(std::size_t n)
    {
        words_.resize((n + 63) / 64, 0);
    }

    Bits operator&(const Bits& o) const
    {
        Bits r;
        r.words_.resize(words_.size());
        for (std::size_t i = 0; i < words_.size(); ++i)
            r.words_[i] = words_[i] & o.words_[i];
        return r;
    }

    bool subset_of(const Bits& o) const
    {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~o.words_[i])
                return false;
        return true;
    }

    std::size_t count() const
    {
        std::size_t c = 0;
        for (auto w : words_)
            c += static_cast<std::size_t>(__builtin_popcountll(w));
        return c;
    }

private:
    std::vector<std::uint64_t> words_;
};

inline IntVec to_integer(std::span<const Rational> v)
{
    const Vector p = primitive(v);
    IntVec out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        out[i] = boost::multiprecision::numerator(p[i]);
    return out;
}

inline Integer idot(const IntVec& a, const IntVec& b)
{
    Integer s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0 && b[i] != 0)
            s += a[i] * b[i];
    return s;
}

inline void make_primitive(IntVec& v)
{
    Integer g = 0;
    for (const auto& x : v)
        if (x != 0)
            g = boost::multiprecision::gcd(g, x);
    if (g > 1)
        for (auto& x : v)
            x /= g;
}

struct Ray
{
    IntVec v;
    Bits zero;
};

/// Extreme rays of the pointed cone {y : a_i . y <= 0}; `rows` must have
/// full column rank.
inline std::vector<IntVec> pointed_extreme_rays(const std::vector<IntVec>& rows, std::size_t k)
{
    const std::size_t m = rows.size();
    // Greedily pick k independent rows to seed a simplicial cone.
    std::vector<std::size_t> seed;
    std::vector<Vector> picked;
    for (std::size_t i = 0; i < m && seed.size() < k; ++i) {
        Vector r(rows[i].begin(), rows[i].end());
        picked.push_back(r);
        if (rank(picked, k) == picked.size())
            seed.push_back(i);
        else
            picked.pop_back();
    }
    if (seed.size() != k)
        throw std::logic_error("double description: constraint system is not pointed");

    Matrix a0(k, k);
    for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < k; ++c)
            a0(r, c) = Rational(rows[seed[r]][c]);
    // Column j of -A0^{-1} is tight on every seed row except row j.
    std::vector<Ray> rays;
    for (std::size_t j = 0; j < k; ++j) {
        Vector rhs = zeros(k);
        rhs[j] = -1;
        Ray ray{to_integer(solve_square(a0, rhs)), Bits(m)};
        for (std::size_t r = 0; r < k; ++r)
            if (r != j)
                ray.zero.set(seed[r]);
        rays.push_back(std::move(ray));
    }

    std::vector<bool> done(m, false);
    for (auto s : seed)
        done[s] = true;
    std::size_t processed = k;

    for (std::size_t i = 0; i < m; ++i) {
        if (done[i])
            continue;
        done[i] = true;
        ++processed;
        std::vector<Integer> val(rays.size());
        std::vector<std::size_t> pos, neg;
        std::vector<Ray> next;
        next.reserve(rays.size());
        for (std::size_t r = 0; r < rays.size(); ++r) {
            val[r] = idot(rows[i], rays[r].v);
            if (val[r] > 0)
                pos.push_back(r);
            else if (val[r] < 0)
                neg.push_back(r);
        }
        if (pos.empty())
            for (std::size_t r = 0; r < rays.size(); ++r)
                if (val[r] == 0)
                    rays[r].zero.set(i);
        if (pos.empty())
            continue;

        for (std::size_t p : pos) {
            for (std::size_t n : neg) {
                Bits common = rays[p].zero & rays[n].zero;
                if (common.count() + 2 < k)
                    continue;
                bool adjacent = true;
                for (std::size_t r = 0; r < rays.size() && adjacent; ++r)
                    if (r != p && r != n && common.subset_of(rays[r].zero))
                        adjacent = false;
                if (!adjacent)
                    continue;
                Ray fresh{IntVec(k), common};
                const Integer& vp = val[p];
                const Integer nn = -val[n];
                for (std::size_t c = 0; c < k; ++c)
                    fresh.v[c] = vp * rays[n].v[c] + nn * rays[p].v[c];
                make_primitive(fresh.v);
                fresh.zero.set(i);
                next.push_back(std::move(fresh));
            }
        }
        for (std::size_t r = 0; r < rays.size(); ++r) {
            if (val[r] > 0)
                continue;
            if (val[r] == 0)
                rays[r].zero.set(i);
            next.push_back(std::move(rays[r]));
        }
        rays = std::move(next);
    }
    (void)processed;

    std::vector<IntVec> out;
    out.reserve(rays.size());
    for (auto& r : rays)
        out.push_back(std::move(r.v));
    return out;
}

} // namespace detail

/// Double-description conversion: generators of
///   { x in Q^dim : a . x <= 0 for a in inequalities, e . x = 0 for e in equalities }.
inline ConeGenerators halfspaces_to_generators(const std::vector<Vector>& inequalities,
                                               const std::vector<Vector>& equalities, std::size_t dim)
{
    std::vector<Vector> ineq;
    for (const auto& a : inequalities) {
        if (a.size() != dim)
            throw std::invalid_argument("halfspaces_to_generators: dimension mismatch");
        if (!is_zero(a))
            ineq.push_back(primitive(a));
    }
    sort_unique(ineq);
    // A pair a, -a is an equality; moving it out shrinks the space the
    // pointed part is computed in.
    std::vector<Vector> equalities_all;
    {
        std::vector<Vector> kept;
        for (const auto& a : ineq) {
            const Vector neg = -a;
            if (std::binary_search(ineq.begin(), ineq.end(), neg, lex_less)) {
                if (lex_less(neg, a))
                    equalities_all.push_back(a);
            } else
                kept.push_back(a);
        }
        ineq = std::move(kept);
    }
    for (const auto& e : equalities) {
        if (e.size() != dim)
            throw std::invalid_argument("halfspaces_to_generators: dimension mismatch");
        if (!is_zero(e))
            equalities_all.push_back(e);
    }
    std::vector<Vector> all = ineq;
    all.insert(all.end(), equalities_all.begin(), equalities_all.end());

    ConeGenerators out;
    out.lineality = span_basis(kernel(all, dim), dim);
    for (auto& l : out.lineality)
        l = canonical_line(l);

    // Restrict to the orthogonal complement of the lineality space and to the
    // equalities; what is left is pointed.
    std::vector<Vector> restrict = out.lineality;
    restrict.insert(restrict.end(), equalities_all.begin(), equalities_all.end());
    const std::vector<Vector> basis = kernel(restrict, dim); // columns of Z
    const std::size_t k = basis.size();
    if (k == 0)
        return out;

    std::vector<detail::IntVec> rows;
    for (const auto& a : ineq) {
        Vector reduced(k);
        for (std::size_t c = 0; c < k; ++c)
            reduced[c] = dot(a, basis[c]);
        if (is_zero(reduced))
            continue;
        rows.push_back(detail::to_integer(reduced));
    }
    // Duplicate reduced rows add nothing but work.
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());

    for (const auto& y : detail::pointed_extreme_rays(rows, k)) {
        Vector x = zeros(dim);
        for (std::size_t c = 0; c < k; ++c)
            if (y[c] != 0)
                for (std::size_t j = 0; j < dim; ++j)
                    if (basis[c][j] != 0)
                        x[j] += Rational(y[c]) * basis[c][j];
        out.rays.push_back(primitive(x));
    }
    sort_unique(out.rays);
    return out;
}

/// Facet description of cone(generators): returns (facet normals, equality
/// basis) such that cone = {x : f . x <= 0, e . x = 0}. Computed as the
/// generators of the polar cone.
inline ConeGenerators generators_to_halfspaces(const std::vector<Vector>& generators, std::size_t dim)
{
    return halfspaces_to_generators(generators, {}, dim);
}

} // namespace suprep
