#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "suprep/rational.hpp"

namespace suprep {

/// 50 significant digits; only used for informational values.
using Decimal = boost::multiprecision::cpp_dec_float_50;

inline Decimal to_decimal(const Rational& r)
{
    return Decimal(boost::multiprecision::numerator(r).str()) / Decimal(boost::multiprecision::denominator(r).str());
}

/// A value in (-inf, +inf]. `exact` is set when the value is a known rational.
struct ExtendedReal
{
    bool infinite = false;
    Decimal value = 0;
    std::optional<Rational> exact;

    static ExtendedReal infinity() { return {true, 0, std::nullopt}; }
    static ExtendedReal of(const Rational& r) { return {false, to_decimal(r), r}; }
    static ExtendedReal approx(const Decimal& d) { return {false, d, std::nullopt}; }

    std::string str(int digits = 20) const
    {
        if (infinite)
            return "+inf";
        if (exact)
            return to_string(*exact);
        return value.str(digits);
    }
};

enum class ConjugateFamily { exponential, logarithmic, power, piecewise };

/// Convex conjugate Phi(y) = sup_{x > a} (U(x) - x y) of a built-in utility,
/// or an explicit convex piecewise-linear Phi. With `hatted` set the function
/// is Phi-hat: Phi on [1, inf), its tangent line at 1 (left derivative) below.
struct ConjugateFunction
{
    ConjugateFamily family = ConjugateFamily::logarithmic;
    Rational parameter = 0;  // gamma for exponential, p for power
    // piecewise: knots (y_k, Phi(y_k)) with y_0 = 0 increasing, then
    // `final_slope` beyond the last knot.
    std::vector<std::pair<Rational, Rational>> knots;
    Rational final_slope = 0;
    bool hatted = false;

    /// U(x) = -exp(-gamma x) / gamma.
    static ConjugateFunction exponential(const Rational& gamma)
    {
        if (gamma <= 0)
            throw std::invalid_argument("exponential utility: gamma must be positive");
        return {ConjugateFamily::exponential, gamma, {}, 0, false};
    }

    /// U(x) = ln x.
    static ConjugateFunction logarithmic() { return {ConjugateFamily::logarithmic, 0, {}, 0, false}; }

    /// U(x) = x^p / p, p < 1, p != 0.
    static ConjugateFunction power(const Rational& p)
    {
        if (p >= 1 || p == 0)
            throw std::invalid_argument("power utility: need p < 1 and p != 0");
        return {ConjugateFamily::power, p, {}, 0, false};
    }

    static ConjugateFunction piecewise(std::vector<std::pair<Rational, Rational>> knots, const Rational& final_slope)
    {
        if (knots.empty() || knots[0].first != 0)
            throw std::invalid_argument("piecewise conjugate: first knot must be at y = 0");
        Rational last_slope;
        for (std::size_t k = 1; k < knots.size(); ++k) {
            if (knots[k].first <= knots[k - 1].first)
                throw std::invalid_argument("piecewise conjugate: knots must increase");
            const Rational s = (knots[k].second - knots[k - 1].second) / (knots[k].first - knots[k - 1].first);
            if (k > 1 && s < last_slope)
                throw std::invalid_argument("piecewise conjugate: slopes must not decrease (convexity)");
            last_slope = s;
        }
        if (knots.size() > 1 && final_slope < last_slope)
            throw std::invalid_argument("piecewise conjugate: slopes must not decrease (convexity)");
        return {ConjugateFamily::piecewise, 0, std::move(knots), final_slope, false};
    }

    ConjugateFunction hat() const
    {
        ConjugateFunction h = *this;
        h.hatted = true;
        return h;
    }

    bool phi_at_zero_finite() const
    {
        if (hatted)
            return true;
        switch (family) {
        case ConjugateFamily::exponential:
        case ConjugateFamily::piecewise:
            return true;
        case ConjugateFamily::logarithmic:
            return false;
        case ConjugateFamily::power:
            return parameter < 0;
        }
        return false;
    }

    /// lim_{y -> inf} D^- Phi(y) < inf. True for utilities on a half-line
    /// (log, power) and for piecewise-linear Phi; Phi-hat agrees with Phi there.
    bool asymptotically_linear() const { return family != ConjugateFamily::exponential; }

    std::string name() const
    {
        std::string base;
        switch (family) {
        case ConjugateFamily::exponential:
            base = "exp:" + to_string(parameter);
            break;
        case ConjugateFamily::logarithmic:
            base = "log";
            break;
        case ConjugateFamily::power:
            base = "power:" + to_string(parameter);
            break;
        case ConjugateFamily::piecewise:
            base = "piecewise";
            break;
        }
        return hatted ? "hat(" + base + ")" : base;
    }
};

namespace detail {

inline Decimal piecewise_eval(const ConjugateFunction& f, const Decimal& y)
{
    const auto& k = f.knots;
    for (std::size_t i = 1; i < k.size(); ++i)
        if (y <= to_decimal(k[i].first)) {
            const Decimal y0 = to_decimal(k[i - 1].first), v0 = to_decimal(k[i - 1].second);
            const Decimal s = to_decimal((k[i].second - k[i - 1].second) / (k[i].first - k[i - 1].first));
            return v0 + s * (y - y0);
        }
    return to_decimal(k.back().second) + to_decimal(f.final_slope) * (y - to_decimal(k.back().first));
}

inline Rational piecewise_exact(const ConjugateFunction& f, const Rational& y)
{
    const auto& k = f.knots;
    for (std::size_t i = 1; i < k.size(); ++i)
        if (y <= k[i].first) {
            const Rational s = (k[i].second - k[i - 1].second) / (k[i].first - k[i - 1].first);
            return k[i - 1].second + s * (y - k[i - 1].first);
        }
    return k.back().second + f.final_slope * (y - k.back().first);
}

/// Phi of the un-hatted family at y > 0, in decimals.
inline Decimal raw_phi(const ConjugateFunction& f, const Decimal& y)
{
    using boost::multiprecision::exp;
    using boost::multiprecision::log;
    switch (f.family) {
    case ConjugateFamily::exponential: {
        // stationarity exp(-gamma x) = y
        const Decimal g = to_decimal(f.parameter);
        return (y * log(y) - y) / g;
    }
    case ConjugateFamily::logarithmic:
        // stationarity 1/x = y
        return -log(y) - 1;
    case ConjugateFamily::power: {
        // Stationarity x^(p-1) = y, solved by Newton's method in t = ln x on
        // h(t) = (p-1) t - ln y.
        const Decimal p = to_decimal(f.parameter);
        const Decimal target = log(y);
        Decimal t = 0;
        for (int it = 0; it < 8; ++it) {
            const Decimal h = (p - 1) * t - target;
            t -= h / (p - 1);
            if (h == 0)
                break;
        }
        const Decimal x = exp(t);
        return exp(p * t) / p - x * y;
    }
    case ConjugateFamily::piecewise:
        return piecewise_eval(f, y);
    }
    return 0;
}

/// Exact values the families admit: Phi(0) and Phi(1).
inline std::optional<ExtendedReal> raw_exact(const ConjugateFunction& f, const Rational& y)
{
    if (f.family == ConjugateFamily::piecewise)
        return ExtendedReal::of(piecewise_exact(f, y));
    if (y == 0) {
        if (!f.phi_at_zero_finite() && !f.hatted)
            return ExtendedReal::infinity();
        return ExtendedReal::of(Rational(0)); // exp: sup of -e^{-gx}/g is 0; power p < 0: sup x^p/p is 0
    }
    if (y == 1) {
        switch (f.family) {
        case ConjugateFamily::exponential:
            return ExtendedReal::of(Rational(-1) / f.parameter);
        case ConjugateFamily::logarithmic:
            return ExtendedReal::of(Rational(-1));
        case ConjugateFamily::power:
            return ExtendedReal::of(1 / f.parameter - 1);
        default:
            break;
        }
    }
    return std::nullopt;
}

} // namespace detail

/// l* = (D^- Phi)(1).
inline Rational left_derivative_at_one(const ConjugateFunction& f)
{
    switch (f.family) {
    case ConjugateFamily::exponential:
        return 0; // Phi'(y) = ln(y) / gamma
    case ConjugateFamily::logarithmic:
    case ConjugateFamily::power:
        return -1; // Phi'(1) = -x*(1) = -1
    case ConjugateFamily::piecewise: {
        const auto& k = f.knots;
        for (std::size_t i = 1; i < k.size(); ++i)
            if (Rational(1) <= k[i].first)
                return (k[i].second - k[i - 1].second) / (k[i].first - k[i - 1].first);
        return f.final_slope;
    }
    }
    return 0;
}

namespace detail {

inline ExtendedReal unhatted_value(const ConjugateFunction& f, const Rational& y)
{
    ConjugateFunction base = f;
    base.hatted = false;
    if (auto e = raw_exact(base, y))
        return *e;
    return ExtendedReal::approx(raw_phi(base, to_decimal(y)));
}

} // namespace detail

/// Phi(y) for y >= 0 (Phi-hat when the function is hatted).
inline ExtendedReal conjugate_value(const ConjugateFunction& f, const Rational& y)
{
    if (y < 0)
        throw std::invalid_argument("conjugate_value: y must be nonnegative");
    if (f.hatted && y < 1) {
        const ExtendedReal one = detail::unhatted_value(f, Rational(1));
        return ExtendedReal::of(*one.exact + left_derivative_at_one(f) * (y - 1));
    }
    return detail::unhatted_value(f, y);
}

/// Phi(y) = +inf? Every family is finite on (0, inf), so only y = 0 can be.
inline bool conjugate_infinite(const ConjugateFunction& f, const Rational& y)
{
    if (y < 0)
        throw std::invalid_argument("conjugate_infinite: y must be nonnegative");
    return y == 0 && !f.phi_at_zero_finite();
}

/// Decimal evaluation at a decimal point y > 0 (used on grids).
inline Decimal conjugate_decimal(const ConjugateFunction& f, const Decimal& y)
{
    if (f.hatted && y < 1) {
        const Rational one = *detail::unhatted_value(f, Rational(1)).exact;
        return to_decimal(one) + to_decimal(left_derivative_at_one(f)) * (y - 1);
    }
    return detail::raw_phi(f, y);
}

/// phi_hat(f, y) = Phi-hat(y): always finite.
inline ExtendedReal phi_hat(const ConjugateFunction& f, const Rational& y)
{
    return conjugate_value(f.hat(), y);
}

/// The utility U behind a built-in family, at x in its domain.
inline Decimal utility_value(const ConjugateFunction& f, const Decimal& x)
{
    using boost::multiprecision::exp;
    using boost::multiprecision::log;
    using boost::multiprecision::pow;
    switch (f.family) {
    case ConjugateFamily::exponential: {
        const Decimal g = to_decimal(f.parameter);
        return -exp(-g * x) / g;
    }
    case ConjugateFamily::logarithmic:
        if (x <= 0)
            throw std::invalid_argument("utility_value: log utility needs x > 0");
        return log(x);
    case ConjugateFamily::power: {
        if (x <= 0)
            throw std::invalid_argument("utility_value: power utility needs x > 0");
        const Decimal p = to_decimal(f.parameter);
        return pow(x, p) / p;
    }
    case ConjugateFamily::piecewise:
        break;
    }
    throw std::invalid_argument("utility_value: piecewise conjugates carry no utility");
}

// ---------------------------------------------------------------------------
// Growth condition
// ---------------------------------------------------------------------------

struct GrowthResult
{
    bool pass = true;
    std::optional<Decimal> y, lambda;
    Decimal lhs = 0, rhs = 0;
    std::string note;
};

/// Phi+(lambda y) <= alpha Phi+(y) + beta (y + 1) for lambda in [lambda0,
/// lambda1], checked on a geometric y grid over [2^-20, 2^20] and an evenly
/// spaced lambda grid. A grid check can refute the condition, never prove it.
inline GrowthResult growth_check(const ConjugateFunction& f, const Rational& lambda0, const Rational& lambda1,
                                 const Rational& alpha, const Rational& beta, std::size_t samples)
{
    if (!(lambda0 > 0 && lambda0 <= lambda1) || alpha <= 0 || beta <= 0 || samples == 0)
        throw std::invalid_argument("growth_check: need 0 < lambda0 <= lambda1, alpha, beta > 0, samples >= 1");
    using boost::multiprecision::pow;
    const Decimal a = to_decimal(alpha), b = to_decimal(beta);
    const Decimal l0 = to_decimal(lambda0), l1 = to_decimal(lambda1);
    auto plus = [](const Decimal& v) { return v > 0 ? v : Decimal(0); };
    GrowthResult r;
    r.note = "grid check over y in [2^-20, 2^20]; the condition is asymptotic and cannot be proved on a grid";
    const std::size_t ny = std::max<std::size_t>(samples, 2);
    const std::size_t nl = std::max<std::size_t>(std::min<std::size_t>(samples, 16), 1);
    for (std::size_t i = 0; i < ny; ++i) {
        const Decimal y = pow(Decimal(2), Decimal(-20) + Decimal(40) * i / (ny - 1));
        const Decimal base = plus(conjugate_decimal(f, y));
        for (std::size_t j = 0; j < nl; ++j) {
            const Decimal lambda = nl == 1 ? l0 : l0 + (l1 - l0) * j / (nl - 1);
            const Decimal lhs = plus(conjugate_decimal(f, lambda * y));
            const Decimal rhs = a * base + b * (y + 1);
            if (lhs > rhs) {
                return GrowthResult{false, y, lambda, lhs, rhs, r.note};
            }
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Truncation inequality
// ---------------------------------------------------------------------------

/// E[f(Y) 1{Y < a}] <= E[f(Y0)] + min{E[f(Y1)], f(a)} with f replaced by
/// f+ = max(f, 0) (the inequality is stated for nonnegative convex f). An
/// absent `a` means a = inf, where f(a) is read as E[f(Y1)]. Decimal values;
/// infinite f values propagate.
inline bool truncation_bound_check(const std::function<ExtendedReal(const Rational&)>& f, const Vector& y0,
                                   const Vector& y, const Vector& y1, const std::optional<Rational>& a,
                                   const Vector& weights)
{
    const std::size_t n = weights.size();
    if (y0.size() != n || y.size() != n || y1.size() != n)
        throw std::invalid_argument("truncation_bound_check: dimension mismatch");
    for (std::size_t i = 0; i < n; ++i)
        if (weights[i] > 0 && !(0 <= y0[i] && y0[i] <= y[i] && y[i] <= y1[i]))
            throw std::invalid_argument("truncation_bound_check: precondition 0 <= Y0 <= Y <= Y1 violated");
    if (a && *a < 0)
        throw std::invalid_argument("truncation_bound_check: a must be nonnegative");

    struct Acc
    {
        bool inf = false;
        Decimal v = 0;
        void add(const ExtendedReal& x, const Rational& w)
        {
            if (x.infinite)
                inf = true;
            else if (x.value > 0)
                v += to_decimal(w) * x.value;
        }
    };
    Acc lhs, e0, e1;
    for (std::size_t i = 0; i < n; ++i) {
        if (weights[i] == 0)
            continue;
        if (!a || y[i] < *a)
            lhs.add(f(y[i]), weights[i]);
        e0.add(f(y0[i]), weights[i]);
        e1.add(f(y1[i]), weights[i]);
    }
    Acc fa = e1;
    if (a) {
        fa = Acc{};
        fa.add(f(*a), Rational(1));
    }
    Acc m = e1;
    if (!fa.inf && (e1.inf || fa.v < e1.v))
        m = fa;
    if (lhs.inf)
        return e0.inf || m.inf;
    if (e0.inf || m.inf)
        return true;
    const Decimal slack("1e-40");
    return lhs.v <= e0.v + m.v + slack;
}

} // namespace suprep
