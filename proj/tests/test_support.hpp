#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "suprep/rational.hpp"

namespace suprep::testing {

inline Vector vec(std::initializer_list<const char*> xs)
{
    Vector v;
    for (const char* x : xs)
        v.push_back(parse_rational(x));
    return v;
}

inline Vector ivec(std::initializer_list<long> xs)
{
    Vector v;
    for (long x : xs)
        v.push_back(Rational(x));
    return v;
}

inline Rational random_rational(std::mt19937_64& rng, long lo, long hi, long max_den = 1)
{
    std::uniform_int_distribution<long> num(lo, hi), den(1, max_den);
    return Rational(num(rng)) / Rational(den(rng));
}

inline Vector random_vector(std::mt19937_64& rng, std::size_t n, long lo, long hi, long max_den = 1)
{
    Vector v(n);
    for (auto& x : v)
        x = random_rational(rng, lo, hi, max_den);
    return v;
}

inline std::vector<Vector> random_vectors(std::mt19937_64& rng, std::size_t count, std::size_t n, long lo, long hi)
{
    std::vector<Vector> out;
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(random_vector(rng, n, lo, hi));
    return out;
}

} // namespace suprep::testing
