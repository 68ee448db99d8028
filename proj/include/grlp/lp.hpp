// Self-contained dense LP backend for box-constrained programs
//   min c'x  s.t.  A x >= b,  lower <= x <= upper
// plus a sup-norm (Chebyshev) fitting helper built on top of it.
//
// Two solve paths, both deterministic simplex with Bland's rule:
//  - small problems: two-phase primal simplex on the shifted tableau;
//  - row-heavy problems (rows >> variables, e.g. per-coordinate projection
//    LPs at large state counts): primal simplex on the dual standard form,
//    which is feasible from scratch and needs O(k * rows) memory instead of
//    O(rows^2). The primal solution is recovered from the equality-row
//    multipliers.
//
// BoxClipped means a box bound is active *with a nonzero multiplier*, i.e.
// the optimal value genuinely depends on the box. Vertices that merely park
// a cost-neutral coordinate on a bound do not count.

#pragma once

#include "grlp/definitions.hpp"

namespace grlp {

enum class LpStatus { Optimal, Infeasible, BoxClipped };

struct DenseLp {
    numvec c;       // k objective coefficients
    Matrix a;       // m x k constraint rows, A x >= b
    numvec b;       // m right-hand sides
    numvec lower;   // k box bounds
    numvec upper;

    int vars() const { return static_cast<int>(c.size()); }
    int rows() const { return a.rows; }

    void validate() const {
        const int k = vars(), m = rows();
        check(k >= 1, "lp: at least one variable required");
        check(m >= 0 && (m == 0 || a.cols == k), "lp: constraint matrix shape mismatch");
        check(static_cast<int>(b.size()) == m, "lp: rhs length mismatch");
        check(static_cast<int>(lower.size()) == k && static_cast<int>(upper.size()) == k,
              "lp: bound length mismatch");
        check(all_finite(c) && all_finite(a.data) && all_finite(b) && all_finite(lower) &&
                  all_finite(upper),
              "lp: all entries must be finite");
        for (int j = 0; j < k; ++j)
            check(lower[j] <= upper[j], "lp: lower bound exceeds upper bound");
    }
};

struct LpOutcome {
    LpStatus status = LpStatus::Infeasible;
    numvec x;       // valid unless Infeasible
    double value = 0.0;
};

namespace detail {

constexpr double kPivotTol = 1e-11;
constexpr double kFeasTol = 1e-9;

struct Tableau {
    int rows, cols;             // body size, excluding objective row / rhs col
    std::vector<numvec> body;   // rows x (cols + 1), last entry rhs
    numvec obj;                 // cols + 1 reduced-cost row
    indvec basic;               // basic column per row; -1 marks a dead row
    std::vector<char> can_enter;

    Tableau(int r, int c)
        : rows(r), cols(c), body(r, numvec(c + 1, 0.0)), obj(c + 1, 0.0),
          basic(r, -1), can_enter(c, 1) {}

    void pivot(int prow, int pcol) {
        numvec& pr = body[prow];
        const double pv = pr[pcol];
        for (double& v : pr) v /= pv;
        pr[pcol] = 1.0;
        for (int r = 0; r < rows; ++r) {
            if (r == prow || basic[r] == -2) continue;
            const double f = body[r][pcol];
            if (f == 0.0) continue;
            numvec& rr = body[r];
            for (int c = 0; c <= cols; ++c) rr[c] -= f * pr[c];
            rr[pcol] = 0.0;
        }
        const double f = obj[pcol];
        if (f != 0.0) {
            for (int c = 0; c <= cols; ++c) obj[c] -= f * pr[c];
            obj[pcol] = 0.0;
        }
        basic[prow] = pcol;
    }

    // Bland's rule; returns false at optimality, throws if unbounded.
    bool step() {
        int enter = -1;
        for (int c = 0; c < cols; ++c)
            if (can_enter[c] && obj[c] < -kPivotTol) { enter = c; break; }
        if (enter < 0) return false;
        int leave = -1;
        double best = 0.0;
        for (int r = 0; r < rows; ++r) {
            if (basic[r] == -2) continue;
            const double coef = body[r][enter];
            if (coef <= kPivotTol) continue;
            const double ratio = body[r][cols] / coef;
            if (leave < 0 || ratio < best - 1e-15 ||
                (std::abs(ratio - best) <= 1e-15 && basic[r] < basic[leave]))
                { leave = r; best = ratio; }
        }
        if (leave < 0)
            throw std::runtime_error("simplex: unbounded direction encountered");
        pivot(leave, enter);
        return true;
    }

    void run() {
        while (step()) {}
    }
};

/// Two-phase primal simplex on the shifted problem y = x - lower.
inline LpOutcome lp_primal(const DenseLp& lp) {
    const int k = lp.vars(), m = lp.rows();
    numvec range(k), bhat(lp.b);
    for (int j = 0; j < k; ++j) range[j] = lp.upper[j] - lp.lower[j];
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < k; ++j) bhat[i] -= lp.a(i, j) * lp.lower[j];
    // the tableau works on the shifted rhs, so the infeasibility test must
    // scale with it rather than with the nominal b
    const double bscale = 1.0 + std::max(inf_norm(bhat), inf_norm(range));

    // columns: y (k) | surplus/slack s (m) | upper-bound slack t (k) | artificials
    int n_art = 0;
    for (int i = 0; i < m; ++i)
        if (bhat[i] > 0.0) ++n_art;
    const int rows = m + k;
    const int cols = k + m + k + n_art;
    Tableau tab(rows, cols);

    int art = k + m + k;
    for (int i = 0; i < m; ++i) {
        numvec& row = tab.body[i];
        if (bhat[i] > 0.0) {
            for (int j = 0; j < k; ++j) row[j] = lp.a(i, j);
            row[k + i] = -1.0;
            row[art] = 1.0;
            row[cols] = bhat[i];
            tab.basic[i] = art++;
        } else {
            for (int j = 0; j < k; ++j) row[j] = -lp.a(i, j);
            row[k + i] = 1.0;
            row[cols] = -bhat[i];
            tab.basic[i] = k + i;
        }
    }
    for (int j = 0; j < k; ++j) {
        numvec& row = tab.body[m + j];
        row[j] = 1.0;
        row[k + m + j] = 1.0;
        row[cols] = range[j];
        tab.basic[m + j] = k + m + j;
    }

    if (n_art > 0) {
        // phase 1: minimize the artificial sum
        for (int r = 0; r < rows; ++r)
            if (tab.basic[r] >= k + m + k)
                for (int c = 0; c <= cols; ++c) tab.obj[c] -= tab.body[r][c];
        for (int c = k + m + k; c < cols; ++c) tab.obj[c] += 1.0;
        tab.run();
        if (-tab.obj[cols] > kFeasTol * bscale) return {LpStatus::Infeasible, {}, 0.0};
        // drive remaining artificials out of the basis (or drop redundant rows)
        for (int r = 0; r < rows; ++r) {
            if (tab.basic[r] < k + m + k) continue;
            int col = -1;
            for (int c = 0; c < k + m + k; ++c)
                if (std::abs(tab.body[r][c]) > 1e-9) { col = c; break; }
            if (col >= 0)
                tab.pivot(r, col);
            else
                tab.basic[r] = -2; // redundant row
        }
        for (int c = k + m + k; c < cols; ++c) tab.can_enter[c] = 0;
    }

    // phase 2 objective
    std::fill(tab.obj.begin(), tab.obj.end(), 0.0);
    for (int j = 0; j < k; ++j) tab.obj[j] = lp.c[j];
    for (int r = 0; r < rows; ++r) {
        if (tab.basic[r] == -2 || tab.basic[r] >= k) continue;
        const double f = lp.c[tab.basic[r]];
        if (f == 0.0) continue;
        for (int c = 0; c <= cols; ++c) tab.obj[c] -= f * tab.body[r][c];
    }
    tab.run();

    numvec x(lp.lower);
    for (int r = 0; r < rows; ++r)
        if (tab.basic[r] >= 0 && tab.basic[r] < k) x[tab.basic[r]] += tab.body[r][cols];
    double value = 0.0;
    for (int j = 0; j < k; ++j) value += lp.c[j] * x[j];

    const double clip_tol = 1e-7 * (1.0 + inf_norm(lp.c));
    bool clipped = false;
    // a bound matters iff its column is nonbasic with a positive reduced cost
    numvec ybasic(k, -1.0);
    for (int r = 0; r < rows; ++r)
        if (tab.basic[r] >= 0 && tab.basic[r] < k) ybasic[tab.basic[r]] = tab.body[r][cols];
    for (int j = 0; j < k; ++j) {
        if (ybasic[j] < 0.0 && tab.obj[j] > clip_tol) clipped = true;           // lower
        bool t_basic = false;
        for (int r = 0; r < rows; ++r) t_basic |= (tab.basic[r] == k + m + j);
        if (!t_basic && tab.obj[k + m + j] > clip_tol) clipped = true;          // upper
    }
    return {clipped ? LpStatus::BoxClipped : LpStatus::Optimal, std::move(x), value};
}

/// Primal simplex on the dual standard form
///   min -b'y - lower'lam + upper'mu   s.t.  A'y + lam - mu = c,  all >= 0,
/// started from the trivially feasible lam/mu basis. A dual unbounded ray
/// certifies primal infeasibility; otherwise x equals the vector of equality
/// row multipliers.
inline LpOutcome lp_dual_form(const DenseLp& lp) {
    const int k = lp.vars(), m = lp.rows();
    const int cols = m + 2 * k;
    Tableau tab(k, cols);

    auto gcol = [&](int q, int j) -> double { // entry j of dual column q
        if (q < m) return lp.a(q, j);
        if (q < m + k) return q - m == j ? 1.0 : 0.0;
        return q - m - k == j ? -1.0 : 0.0;
    };
    numvec cost(cols);
    for (int q = 0; q < m; ++q) cost[q] = -lp.b[q];
    for (int j = 0; j < k; ++j) cost[m + j] = -lp.lower[j];
    for (int j = 0; j < k; ++j) cost[m + k + j] = lp.upper[j];

    numvec sign(k, 1.0);
    for (int j = 0; j < k; ++j) {
        const bool use_lower = lp.c[j] >= 0.0;
        sign[j] = use_lower ? 1.0 : -1.0;
        tab.basic[j] = use_lower ? m + j : m + k + j;
        numvec& row = tab.body[j];
        for (int q = 0; q < m; ++q) row[q] = sign[j] * lp.a(q, j);
        row[m + j] = sign[j];
        row[m + k + j] = -sign[j];
        row[cols] = sign[j] * lp.c[j];
    }
    for (int c = 0; c < cols; ++c) tab.obj[c] = cost[c];
    tab.obj[cols] = 0.0;
    for (int j = 0; j < k; ++j) {
        const double f = cost[tab.basic[j]];
        if (f == 0.0) continue;
        for (int c = 0; c <= cols; ++c) tab.obj[c] -= f * tab.body[j][c];
    }

    try {
        tab.run();
    } catch (const std::runtime_error&) {
        return {LpStatus::Infeasible, {}, 0.0}; // dual unbounded
    }

    // multipliers of the k equality rows: solve G_B' pi = cost_B, x = -pi
    Matrix gbt(k, k);
    numvec cb(k);
    for (int r = 0; r < k; ++r) {
        for (int j = 0; j < k; ++j) gbt(r, j) = gcol(tab.basic[r], j);
        cb[r] = cost[tab.basic[r]];
    }
    numvec pi = solve_dense(std::move(gbt), std::move(cb));
    numvec x(k);
    for (int j = 0; j < k; ++j) x[j] = -pi[j];
    double value = 0.0;
    for (int j = 0; j < k; ++j) value += lp.c[j] * x[j];

    const double clip_tol = 1e-7 * (1.0 + inf_norm(lp.c));
    bool clipped = false;
    for (int r = 0; r < k; ++r)
        if (tab.basic[r] >= m && tab.body[r][cols] > clip_tol) clipped = true;
    return {clipped ? LpStatus::BoxClipped : LpStatus::Optimal, std::move(x), value};
}

} // namespace detail

/// Deterministic solve of a box-constrained dense LP. Unboundedness cannot
/// occur (the box is compact); infeasibility is reported as a status.
inline LpOutcome lp_solve(const DenseLp& lp) {
    lp.validate();
    const bool wide = lp.rows() >= 64 && lp.rows() >= 8 * lp.vars();
    LpOutcome out = wide ? detail::lp_dual_form(lp) : detail::lp_primal(lp);
    if (out.status == LpStatus::Infeasible) return out;
    // enforce the advertised feasibility tolerances, per row, scaled by the
    // magnitudes the arithmetic actually involves
    for (int i = 0; i < lp.rows(); ++i) {
        double lhs = 0.0, rowscale = 1.0 + std::abs(lp.b[i]);
        for (int j = 0; j < lp.vars(); ++j) {
            lhs += lp.a(i, j) * out.x[j];
            rowscale += std::abs(lp.a(i, j)) *
                        std::max(std::abs(lp.lower[j]), std::abs(lp.upper[j]));
        }
        if (lhs < lp.b[i] - detail::kFeasTol * 100.0 * rowscale)
            throw std::runtime_error("lp_solve: solution violates a constraint by " +
                                     std::to_string(lp.b[i] - lhs));
    }
    for (int j = 0; j < lp.vars(); ++j)
        out.x[j] = std::clamp(out.x[j], lp.lower[j], lp.upper[j]);
    return out;
}

struct ChebyshevFit {
    numvec coeffs;  // k
    double eps;     // sup-norm residual, unique even when coeffs are not
    bool rank_deficient;
};

/// Best sup-norm linear fit: min_r ||target - Phi r||_inf, solved as the
/// standard epigraph LP in (r, t).
inline ChebyshevFit chebyshev_fit(const Matrix& phi, const numvec& target) {
    const int n = phi.rows, k = phi.cols;
    check(static_cast<int>(target.size()) == n, "chebyshev_fit: length mismatch");
    check(k >= 1, "chebyshev_fit: empty basis");
    const double tscale = inf_norm(target);

    DenseLp lp;
    lp.c.assign(k + 1, 0.0);
    lp.c[k] = 1.0;
    lp.a = Matrix(2 * n, k + 1);
    lp.b.assign(2 * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j) {
            lp.a(i, j) = phi(i, j);       //  Phi r + t >= target
            lp.a(n + i, j) = -phi(i, j);  // -Phi r + t >= -target
        }
        lp.a(i, k) = 1.0;
        lp.a(n + i, k) = 1.0;
        lp.b[i] = target[i];
        lp.b[n + i] = -target[i];
    }
    const double r_bound = 1e3 * std::max(1.0, tscale);
    lp.lower.assign(k + 1, -r_bound);
    lp.upper.assign(k + 1, r_bound);
    lp.lower[k] = 0.0;
    lp.upper[k] = 2.0 * tscale + 1.0;

    LpOutcome out = lp_solve(lp);
    if (out.status == LpStatus::Infeasible)
        throw std::runtime_error("chebyshev_fit: unexpected infeasibility");
    ChebyshevFit fit;
    fit.coeffs.assign(out.x.begin(), out.x.begin() + k);
    fit.eps = out.x[k];
    fit.rank_deficient = detail::column_rank(phi) < k;
    return fit;
}

} // namespace grlp
