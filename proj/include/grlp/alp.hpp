// Feature matrices, state-relevance weights, the unfurled constraint system
// of the feature-restricted MDP linear program, constraint aggregators, and
// the exact / feature-restricted / aggregated solvers built on lp_solve.

#pragma once

#include "grlp/definitions.hpp"
#include "grlp/lp.hpp"
#include "grlp/mdp.hpp"

namespace grlp {

/// n x k basis whose first column is all ones. column_scale carries the
/// conversion factor between stored (conditioned) coordinates and raw-unit
/// coordinates; it is 1 for generic bases and (n-1)^j for normalized
/// polynomial features.
struct FeatureMatrix {
    Matrix phi;
    numvec column_scale;

    int states() const { return phi.rows; }
    int count() const { return phi.cols; }

    void validate() const {
        check(phi.rows >= 1 && phi.cols >= 1, "features: empty matrix");
        check(static_cast<int>(column_scale.size()) == phi.cols,
              "features: column scale length mismatch");
        for (int i = 0; i < phi.rows; ++i)
            check(std::abs(phi(i, 0) - 1.0) <= 1e-12,
                  "features: first column must be all ones");
        check(detail::column_rank(phi) == phi.cols,
              "features: columns are not linearly independent");
    }

    static FeatureMatrix plain(Matrix m) {
        FeatureMatrix f{std::move(m), {}};
        f.column_scale.assign(f.phi.cols, 1.0);
        f.validate();
        return f;
    }

    numvec apply(const numvec& r) const {
        numvec out(phi.rows, 0.0);
        for (int i = 0; i < phi.rows; ++i)
            for (int j = 0; j < phi.cols; ++j) out[i] += phi(i, j) * r[j];
        return out;
    }
};

/// Probability distribution over states, used to weight the LP objectives
/// and the reported L1 errors.
struct StateWeights {
    numvec c;

    void validate() const {
        check(!c.empty(), "state weights: empty");
        double total = 0.0;
        for (double w : c) {
            check(w >= 0.0, "state weights: negative entry");
            total += w;
        }
        check(std::abs(total - 1.0) <= 1e-9, "state weights: must sum to 1");
    }

    static StateWeights uniform(int n) {
        return {numvec(n, 1.0 / n)};
    }
};

/// The decision-variable box. The half-width is interpreted either directly
/// on the stored feature coordinates or in raw-power units (scaled per column
/// so that normalized- and raw-basis runs are exactly equivalent).
struct Box {
    double halfwidth = 1e6;
    enum class Units { Coefficient, RawPower } units = Units::Coefficient;

    numvec lower_for(const FeatureMatrix& f) const {
        numvec lo(f.count());
        for (int j = 0; j < f.count(); ++j)
            lo[j] = -halfwidth * (units == Units::RawPower ? f.column_scale[j] : 1.0);
        return lo;
    }
    numvec upper_for(const FeatureMatrix& f) const {
        numvec up = lower_for(f);
        for (double& v : up) v = -v;
        return up;
    }
};

/// The nd x k system stacking (I - alpha P_a) Phi action-major: row a*n + s
/// holds the constraint for (state s, action a), with offset g_a(s).
struct AlpSystem {
    Matrix a;
    numvec b_offset;
    int num_states = 0;
    int num_actions = 0;
};

inline AlpSystem build_alp_constraints(const MdpModel& model, const FeatureMatrix& f) {
    check(f.states() == model.num_states, "features: state count mismatch");
    const int n = model.num_states, d = model.num_actions, k = f.count();
    AlpSystem sys;
    sys.num_states = n;
    sys.num_actions = d;
    sys.a = Matrix(n * d, k);
    sys.b_offset.assign(n * d, 0.0);
    for (int a = 0; a < d; ++a)
        for (int s = 0; s < n; ++s) {
            const int row = a * n + s;
            for (int j = 0; j < k; ++j) sys.a(row, j) = f.phi(s, j);
            for (const Transition& t : model.kernel[a][s])
                for (int j = 0; j < k; ++j)
                    sys.a(row, j) -= model.alpha * t.prob * f.phi(t.to, j);
            sys.b_offset[row] = model.reward[a][s];
        }
    return sys;
}

enum class WKind { Aggregation, SampledByC, SampledIdeal, Random, Selection };

inline const char* to_string(WKind k) {
    switch (k) {
    case WKind::Aggregation: return "aggregation";
    case WKind::SampledByC: return "sampled_c";
    case WKind::SampledIdeal: return "sampled_ideal";
    case WKind::Random: return "random";
    case WKind::Selection: return "selection";
    }
    return "?";
}

/// Nonnegative nd x m matrix turning the unfurled constraints into m positive
/// linear combinations.
struct ConstraintAggregator {
    Matrix w;
    WKind kind = WKind::Selection;

    int rows() const { return w.rows; }
    int columns() const { return w.cols; }

    void validate() const {
        check(w.rows >= 1 && w.cols >= 1, "aggregator: empty matrix");
        check(w.cols <= w.rows, "aggregator: more columns than constraint rows");
        for (int j = 0; j < w.cols; ++j) {
            double colsum = 0.0;
            for (int i = 0; i < w.rows; ++i) {
                check(w(i, j) >= 0.0, "aggregator: negative entry");
                colsum += w(i, j);
            }
            check(colsum > 0.0, "aggregator: all-zero column");
        }
    }
};

/// 0/1 matrix with one selected constraint row per column; the aggregated
/// program then coincides with the row-subset (sampled-constraint) program.
inline ConstraintAggregator selection_w(const indvec& sampled_rows, int nd) {
    check(!sampled_rows.empty(), "selection_w: no rows given");
    ConstraintAggregator agg;
    agg.kind = WKind::Selection;
    agg.w = Matrix(nd, static_cast<int>(sampled_rows.size()));
    for (size_t j = 0; j < sampled_rows.size(); ++j) {
        check(sampled_rows[j] >= 0 && sampled_rows[j] < nd,
              "selection_w: row index out of range");
        agg.w(sampled_rows[j], static_cast<int>(j)) = 1.0;
    }
    agg.validate();
    return agg;
}

/// Adjacent-state aggregation: column i sums the constraints of states
/// [i*(n/m), (i+1)*(n/m)) under every action.
inline ConstraintAggregator aggregation_w(int n, int d, int m) {
    check(m >= 1 && n >= 1 && d >= 1, "aggregation_w: bad dimensions");
    check(n % m == 0, "aggregation_w: group count must divide the state count");
    const int size = n / m;
    ConstraintAggregator agg;
    agg.kind = WKind::Aggregation;
    agg.w = Matrix(n * d, m);
    for (int i = 0; i < m; ++i)
        for (int l = 0; l < d; ++l)
            for (int k = 0; k < size; ++k) agg.w(i * size + k + l * n, i) = 1.0;
    agg.validate();
    return agg;
}

/// m constraint rows drawn i.i.d. (with replacement) from a distribution over
/// the nd rows; duplicates are kept as duplicate columns.
inline ConstraintAggregator sampled_w(const numvec& row_weights, int m, uint64_t seed,
                                      WKind kind = WKind::SampledByC) {
    check(m >= 1, "sampled_w: need at least one sample");
    double total = 0.0;
    for (double w : row_weights) {
        check(w >= 0.0, "sampled_w: negative weight");
        total += w;
    }
    check(std::abs(total - 1.0) <= 1e-6, "sampled_w: weights must sum to 1");
    Rng rng(seed);
    indvec rows(m);
    for (int j = 0; j < m; ++j) rows[j] = rng.draw_weighted(row_weights);
    ConstraintAggregator agg = selection_w(rows, static_cast<int>(row_weights.size()));
    agg.kind = kind;
    return agg;
}

/// Dense random aggregator with entries i.i.d. uniform on (0, 1).
inline ConstraintAggregator random_w(int nd, int m, uint64_t seed) {
    check(m >= 1 && m <= nd, "random_w: bad column count");
    Rng rng(seed);
    ConstraintAggregator agg;
    agg.kind = WKind::Random;
    agg.w = Matrix(nd, m);
    for (int i = 0; i < nd; ++i)
        for (int j = 0; j < m; ++j) agg.w(i, j) = rng.uniform_open();
    agg.validate();
    return agg;
}

/// W' M for the action-major stacked system (m_agg x k from nd x k).
inline Matrix aggregate_rows(const ConstraintAggregator& agg, const Matrix& m) {
    check(agg.rows() == m.rows, "aggregator: row count mismatch");
    Matrix out(agg.columns(), m.cols);
    for (int i = 0; i < m.rows; ++i) {
        const double* src = m.row(i);
        for (int j = 0; j < agg.columns(); ++j) {
            const double w = agg.w(i, j);
            if (w == 0.0) continue;
            double* dst = out.row(j);
            for (int c = 0; c < m.cols; ++c) dst[c] += w * src[c];
        }
    }
    return out;
}

inline numvec aggregate_vector(const ConstraintAggregator& agg, const numvec& v) {
    check(agg.rows() == static_cast<int>(v.size()), "aggregator: vector length mismatch");
    numvec out(agg.columns(), 0.0);
    for (int i = 0; i < agg.rows(); ++i) {
        if (v[i] == 0.0) continue;
        for (int j = 0; j < agg.columns(); ++j) out[j] += agg.w(i, j) * v[i];
    }
    return out;
}

/// Exact solve of the full-variable program min c'J s.t. J >= (one-step
/// lookahead) for every state-action pair. The box is derived from the reward
/// scale and provably contains the optimum, so it can never bind.
inline ValueFunction solve_exact_lp(const MdpModel& model, const StateWeights& weights) {
    check(model.num_states <= 2000, "solve_exact_lp: guard n <= 2000 exceeded");
    weights.validate();
    check(static_cast<int>(weights.c.size()) == model.num_states,
          "solve_exact_lp: weight length mismatch");
    const int n = model.num_states, d = model.num_actions;
    double gmax = 0.0;
    for (int a = 0; a < d; ++a) gmax = std::max(gmax, inf_norm(model.reward[a]));
    const double bound = 1.05 * gmax / (1.0 - model.alpha) + 1.0;

    DenseLp lp;
    lp.c = weights.c;
    lp.a = Matrix(n * d, n);
    lp.b.assign(n * d, 0.0);
    for (int a = 0; a < d; ++a)
        for (int s = 0; s < n; ++s) {
            const int row = a * n + s;
            lp.a(row, s) += 1.0;
            for (const Transition& t : model.kernel[a][s])
                lp.a(row, t.to) -= model.alpha * t.prob;
            lp.b[row] = model.reward[a][s];
        }
    lp.lower.assign(n, -bound);
    lp.upper.assign(n, bound);
    LpOutcome out = lp_solve(lp);
    if (out.status != LpStatus::Optimal)
        throw std::runtime_error("solve_exact_lp: unexpected solver status");
    return out.x;
}

/// Solution of a feature-restricted program: the weight vector, the value
/// function it spans, and the solver status.
struct WeightedFit {
    numvec coeffs;
    ValueFunction values;
    LpStatus status = LpStatus::Optimal;
};

inline WeightedFit solve_restricted(const MdpModel& model, const FeatureMatrix& f,
                                    const Matrix& rows, const numvec& rhs,
                                    const StateWeights& weights, const Box& box) {
    weights.validate();
    check(static_cast<int>(weights.c.size()) == model.num_states,
          "restricted lp: weight length mismatch");
    DenseLp lp;
    lp.c.assign(f.count(), 0.0);
    for (int s = 0; s < f.states(); ++s)
        for (int j = 0; j < f.count(); ++j) lp.c[j] += weights.c[s] * f.phi(s, j);
    lp.a = rows;
    lp.b = rhs;
    lp.lower = box.lower_for(f);
    lp.upper = box.upper_for(f);
    LpOutcome out = lp_solve(lp);
    if (out.status == LpStatus::Infeasible)
        throw std::runtime_error(
            "restricted lp: infeasible; the box is too small for this system");
    WeightedFit fit;
    fit.coeffs = out.x;
    fit.values = f.apply(out.x);
    fit.status = out.status;
    return fit;
}

/// Feature-restricted program over the full unfurled constraint set.
inline WeightedFit solve_alp(const MdpModel& model, const FeatureMatrix& f,
                             const StateWeights& weights, const Box& box) {
    AlpSystem sys = build_alp_constraints(model, f);
    return solve_restricted(model, f, sys.a, sys.b_offset, weights, box);
}

/// Feature-restricted program with the constraints replaced by their
/// aggregated positive combinations.
inline WeightedFit solve_grlp(const MdpModel& model, const FeatureMatrix& f,
                              const ConstraintAggregator& agg, const StateWeights& weights,
                              const Box& box) {
    agg.validate();
    AlpSystem sys = build_alp_constraints(model, f);
    check(agg.rows() == sys.a.rows, "solve_grlp: aggregator size mismatch");
    Matrix rows = aggregate_rows(agg, sys.a);
    numvec rhs = aggregate_vector(agg, sys.b_offset);
    return solve_restricted(model, f, rows, rhs, weights, box);
}

} // namespace grlp
