#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "suprep/rational.hpp"

namespace suprep {

enum class RowSense { le, eq, ge };
enum class VarBound { free, nonneg };

/// maximize objective . x  subject to  constraint_matrix x (sense) rhs.
struct LinearProgram
{
    Vector objective;
    Matrix constraint_matrix;
    Vector rhs;
    std::vector<RowSense> row_sense;
    std::vector<VarBound> variable_bounds;

    std::size_t num_vars() const { return objective.size(); }
    std::size_t num_rows() const { return rhs.size(); }

    void validate() const
    {
        if (constraint_matrix.rows() != rhs.size() || row_sense.size() != rhs.size())
            throw std::invalid_argument("LinearProgram: row count mismatch");
        if (constraint_matrix.cols() != objective.size() || variable_bounds.size() != objective.size())
            throw std::invalid_argument("LinearProgram: column count mismatch");
    }
};

enum class LPStatus { optimal, infeasible, unbounded };

/// Outcome of solve(). For `optimal`, primal_point and dual_point have equal
/// objective values. For `infeasible`, certificate is a Farkas multiplier y on
/// the rows (sign-restricted like the dual) with A^T y >= 0 on nonnegative
/// columns, = 0 on free columns and rhs . y < 0. For `unbounded`, primal_point
/// is feasible and certificate is an improving recession ray.
struct LPOutcome
{
    LPStatus status = LPStatus::infeasible;
    std::optional<Vector> primal_point;
    std::optional<Vector> dual_point;
    std::optional<Vector> certificate;
    Rational value = 0;
};

namespace detail {

class Simplex
{
public:
    explicit Simplex(const LinearProgram& lp) : lp_(lp)
    {
        lp.validate();
        m_ = lp.num_rows();
        for (std::size_t j = 0; j < lp.num_vars(); ++j) {
            col_of_var_.push_back(n_++);
            if (lp.variable_bounds[j] == VarBound::free)
                neg_col_of_var_.push_back(n_++);
            else
                neg_col_of_var_.push_back(npos);
        }
        for (std::size_t i = 0; i < m_; ++i)
            slack_col_.push_back(lp.row_sense[i] == RowSense::eq ? npos : n_++);
        structural_ = n_;
        width_ = n_ + m_;
        tab_ = Matrix(m_, width_);
        b_.assign(m_, Rational(0));
        sign_.assign(m_, Rational(1));
        for (std::size_t i = 0; i < m_; ++i) {
            sign_[i] = lp.rhs[i] < 0 ? -1 : 1;
            for (std::size_t j = 0; j < lp.num_vars(); ++j) {
                const Rational& a = lp.constraint_matrix(i, j);
                if (a == 0)
                    continue;
                tab_(i, col_of_var_[j]) = sign_[i] * a;
                if (neg_col_of_var_[j] != npos)
                    tab_(i, neg_col_of_var_[j]) = -sign_[i] * a;
            }
            if (slack_col_[i] != npos)
                tab_(i, slack_col_[i]) = sign_[i] * (lp.row_sense[i] == RowSense::le ? 1 : -1);
            tab_(i, structural_ + i) = 1;
            b_[i] = sign_[i] * lp.rhs[i];
        }
        basis_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i)
            basis_[i] = structural_ + i;
    }

    LPOutcome run()
    {
        // Phase 1: maximize -sum(artificials).
        Vector c1(width_, Rational(0));
        for (std::size_t i = 0; i < m_; ++i)
            c1[structural_ + i] = -1;
        iterate(c1, width_);
        Rational phase1 = 0;
        for (std::size_t i = 0; i < m_; ++i)
            phase1 += c1[basis_[i]] * b_[i];
        if (phase1 < 0) {
            LPOutcome out;
            out.status = LPStatus::infeasible;
            out.certificate = row_duals(c1);
            return out;
        }
        drive_out_artificials();

        Vector c2(width_, Rational(0));
        for (std::size_t j = 0; j < lp_.num_vars(); ++j) {
            c2[col_of_var_[j]] = lp_.objective[j];
            if (neg_col_of_var_[j] != npos)
                c2[neg_col_of_var_[j]] = -lp_.objective[j];
        }
        const auto unbounded_col = iterate(c2, structural_);
        LPOutcome out;
        out.primal_point = primal();
        out.value = dot(lp_.objective, *out.primal_point);
        if (unbounded_col) {
            out.status = LPStatus::unbounded;
            Vector z(width_, Rational(0));
            z[*unbounded_col] = 1;
            for (std::size_t i = 0; i < m_; ++i)
                z[basis_[i]] = -tab_(i, *unbounded_col);
            out.certificate = to_original(z);
            return out;
        }
        out.status = LPStatus::optimal;
        out.dual_point = row_duals(c2);
        return out;
    }

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    // Bland's rule; returns the entering column if the LP is unbounded.
    std::optional<std::size_t> iterate(const Vector& c, std::size_t enter_limit)
    {
        for (;;) {
            std::size_t enter = npos;
            for (std::size_t j = 0; j < enter_limit; ++j) {
                if (is_basic(j))
                    continue;
                Rational d = c[j];
                for (std::size_t i = 0; i < m_; ++i)
                    if (tab_(i, j) != 0 && c[basis_[i]] != 0)
                        d -= c[basis_[i]] * tab_(i, j);
                if (d > 0) {
                    enter = j;
                    break;
                }
            }
            if (enter == npos)
                return std::nullopt;
            std::size_t leave = npos;
            Rational best;
            for (std::size_t i = 0; i < m_; ++i) {
                if (tab_(i, enter) <= 0)
                    continue;
                Rational ratio = b_[i] / tab_(i, enter);
                if (leave == npos || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == npos)
                return enter;
            pivot(leave, enter);
        }
    }

    void pivot(std::size_t r, std::size_t c)
    {
        const Rational inv = 1 / tab_(r, c);
        for (auto& x : tab_.row(r))
            x *= inv;
        b_[r] *= inv;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r || tab_(i, c) == 0)
                continue;
            const Rational f = tab_(i, c);
            for (std::size_t j = 0; j < width_; ++j)
                if (tab_(r, j) != 0)
                    tab_(i, j) -= f * tab_(r, j);
            b_[i] -= f * b_[r];
        }
        basis_[r] = c;
    }

    bool is_basic(std::size_t j) const
    {
        for (auto b : basis_)
            if (b == j)
                return true;
        return false;
    }

    void drive_out_artificials()
    {
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < structural_)
                continue;
            for (std::size_t j = 0; j < structural_; ++j) {
                if (tab_(i, j) != 0 && !is_basic(j)) {
                    pivot(i, j);
                    break;
                }
            }
        }
    }

    // y^T = c_B^T B^{-1}, read off the artificial block, mapped to the
    // original (unflipped) rows.
    Vector row_duals(const Vector& c) const
    {
        Vector y(m_, Rational(0));
        for (std::size_t k = 0; k < m_; ++k) {
            Rational s = 0;
            for (std::size_t i = 0; i < m_; ++i)
                if (c[basis_[i]] != 0)
                    s += c[basis_[i]] * tab_(i, structural_ + k);
            y[k] = sign_[k] * s;
        }
        return y;
    }

    Vector primal() const
    {
        Vector z(width_, Rational(0));
        for (std::size_t i = 0; i < m_; ++i)
            z[basis_[i]] = b_[i];
        return to_original(z);
    }

    Vector to_original(const Vector& z) const
    {
        Vector x(lp_.num_vars());
        for (std::size_t j = 0; j < lp_.num_vars(); ++j) {
            x[j] = z[col_of_var_[j]];
            if (neg_col_of_var_[j] != npos)
                x[j] -= z[neg_col_of_var_[j]];
        }
        return x;
    }

    const LinearProgram& lp_;
    std::size_t m_ = 0;
    std::size_t n_ = 0;
    std::size_t structural_ = 0;
    std::size_t width_ = 0;
    std::vector<std::size_t> col_of_var_;
    std::vector<std::size_t> neg_col_of_var_;
    std::vector<std::size_t> slack_col_;
    Matrix tab_;
    Vector b_;
    Vector sign_;
    std::vector<std::size_t> basis_;
};

inline bool row_holds(const Rational& lhs, RowSense s, const Rational& rhs)
{
    switch (s) {
    case RowSense::le: return lhs <= rhs;
    case RowSense::ge: return lhs >= rhs;
    case RowSense::eq: return lhs == rhs;
    }
    return false;
}

inline bool dual_sign_ok(const Rational& y, RowSense s)
{
    return s == RowSense::eq || (s == RowSense::le ? y >= 0 : y <= 0);
}

} // namespace detail

inline bool is_feasible_point(const LinearProgram& lp, const Vector& x)
{
    if (x.size() != lp.num_vars())
        return false;
    for (std::size_t j = 0; j < x.size(); ++j)
        if (lp.variable_bounds[j] == VarBound::nonneg && x[j] < 0)
            return false;
    const Vector ax = lp.constraint_matrix * x;
    for (std::size_t i = 0; i < ax.size(); ++i)
        if (!detail::row_holds(ax[i], lp.row_sense[i], lp.rhs[i]))
            return false;
    return true;
}

/// Checks an outcome by direct substitution into the LP.
inline bool verify_outcome(const LinearProgram& lp, const LPOutcome& out)
{
    const Matrix at = lp.constraint_matrix.transpose();
    switch (out.status) {
    case LPStatus::optimal: {
        if (!out.primal_point || !out.dual_point || !is_feasible_point(lp, *out.primal_point))
            return false;
        const Vector& y = *out.dual_point;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (!detail::dual_sign_ok(y[i], lp.row_sense[i]))
                return false;
        const Vector aty = at * y;
        for (std::size_t j = 0; j < aty.size(); ++j) {
            if (lp.variable_bounds[j] == VarBound::free ? aty[j] != lp.objective[j] : aty[j] < lp.objective[j])
                return false;
        }
        return dot(lp.objective, *out.primal_point) == dot(lp.rhs, y);
    }
    case LPStatus::infeasible: {
        if (!out.certificate)
            return false;
        const Vector& y = *out.certificate;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (!detail::dual_sign_ok(y[i], lp.row_sense[i]))
                return false;
        const Vector aty = at * y;
        for (std::size_t j = 0; j < aty.size(); ++j) {
            if (lp.variable_bounds[j] == VarBound::free ? aty[j] != 0 : aty[j] < 0)
                return false;
        }
        return dot(lp.rhs, y) < 0;
    }
    case LPStatus::unbounded: {
        if (!out.primal_point || !out.certificate || !is_feasible_point(lp, *out.primal_point))
            return false;
        const Vector& d = *out.certificate;
        for (std::size_t j = 0; j < d.size(); ++j)
            if (lp.variable_bounds[j] == VarBound::nonneg && d[j] < 0)
                return false;
        const Vector ad = lp.constraint_matrix * d;
        for (std::size_t i = 0; i < ad.size(); ++i)
            if (!detail::row_holds(ad[i], lp.row_sense[i], Rational(0)))
                return false;
        return dot(lp.objective, d) > 0;
    }
    }
    return false;
}

/// Two-phase primal simplex over the rationals with Bland's rule. Every
/// outcome is checked by substitution before it is returned.
inline LPOutcome solve(const LinearProgram& lp)
{
    detail::Simplex simplex(lp);
    LPOutcome out = simplex.run();
    if (!verify_outcome(lp, out))
        throw std::logic_error("exact_lp::solve produced a certificate that does not verify");
    return out;
}

/// Convenience: is {x : rows} nonempty (objective ignored)?
inline bool feasible(LinearProgram lp)
{
    lp.objective.assign(lp.num_vars(), Rational(0));
    return solve(lp).status != LPStatus::infeasible;
}

// ---------------------------------------------------------------------------
// Farkas alternative
// ---------------------------------------------------------------------------

enum class FarkasBranch { primal, dual };

/// Exactly one of: x >= 0 with Ax = b (primal), or y with <y,b> > 0 and
/// A^T y <= 0 (dual).
struct FarkasAlternative
{
    FarkasBranch branch = FarkasBranch::primal;
    std::optional<Vector> x;
    std::optional<Vector> y;
};

inline bool verify_primal_branch(const Matrix& a, const Vector& b, const Vector& x)
{
    if (x.size() != a.cols())
        return false;
    for (const auto& v : x)
        if (v < 0)
            return false;
    return a * x == b;
}

inline bool verify_dual_branch(const Matrix& a, const Vector& b, const Vector& y)
{
    if (y.size() != a.rows() || dot(y, b) <= 0)
        return false;
    for (const auto& v : a.transpose() * y)
        if (v > 0)
            return false;
    return true;
}

inline bool verify(const Matrix& a, const Vector& b, const FarkasAlternative& alt)
{
    if (alt.branch == FarkasBranch::primal)
        return alt.x && !alt.y && verify_primal_branch(a, b, *alt.x);
    return alt.y && !alt.x && verify_dual_branch(a, b, *alt.y);
}

inline FarkasAlternative farkas_alternative(const Matrix& a, const Vector& b)
{
    if (b.size() != a.rows())
        throw std::invalid_argument("farkas_alternative: dimension mismatch");
    LinearProgram lp;
    lp.objective = zeros(a.cols());
    lp.constraint_matrix = a;
    lp.rhs = b;
    lp.row_sense.assign(a.rows(), RowSense::eq);
    lp.variable_bounds.assign(a.cols(), VarBound::nonneg);
    const LPOutcome out = solve(lp);
    FarkasAlternative alt;
    if (out.status == LPStatus::infeasible) {
        alt.branch = FarkasBranch::dual;
        alt.y = -*out.certificate;
    } else {
        alt.branch = FarkasBranch::primal;
        alt.x = *out.primal_point;
    }
    if (!verify(a, b, alt))
        throw std::logic_error("farkas_alternative: certificate failed verification");
    return alt;
}

} // namespace suprep
