// Least-upper-bound projection onto the feature span, its aggregated
// relaxation, and their fixed-point iterations. Each projected coordinate is
// the optimal value of a small LP over the box chi; the per-coordinate LPs
// share one constraint system and differ only in the objective row.

#pragma once

#include "grlp/alp.hpp"
#include "grlp/definitions.hpp"
#include "grlp/lp.hpp"
#include "grlp/mdp.hpp"

namespace grlp {

struct ProjectionResult {
    ValueFunction values;
    // true when some coordinate LP's optimum genuinely depends on the box
    bool box_clipped = false;
};

namespace detail {

inline ProjectionResult project_coordinates(const FeatureMatrix& f, const Matrix& rows,
                                            const numvec& rhs, const Box& box) {
    const int n = f.states(), k = f.count();
    DenseLp lp;
    lp.a = rows;
    lp.b = rhs;
    lp.lower = box.lower_for(f);
    lp.upper = box.upper_for(f);
    lp.c.assign(k, 0.0);
    ProjectionResult res;
    res.values.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j) lp.c[j] = f.phi(i, j);
        LpOutcome out = lp_solve(lp);
        if (out.status == LpStatus::Infeasible)
            throw std::runtime_error(
                "projection: coordinate program infeasible; box too small");
        res.values[i] = out.value;
        res.box_clipped |= (out.status == LpStatus::BoxClipped);
    }
    return res;
}

} // namespace detail

/// Per-coordinate least value achievable in the feature span subject to
/// dominating the one-step lookahead of J: coordinate i is the optimum of
///   min (Phi r)(i)  s.t.  Phi r >= TJ,  r in chi.
/// The result dominates TJ componentwise.
inline ProjectionResult lub_project(const MdpModel& model, const FeatureMatrix& f,
                                    const Box& box, const ValueFunction& j) {
    check(f.states() == model.num_states, "lub_project: feature size mismatch");
    numvec targets = bellman_apply(model, j);
    return detail::project_coordinates(f, f.phi, targets, box);
}

/// Aggregated relaxation: the dominance constraints are replaced by their
/// m positive combinations through the aggregator, applied to the un-maximized
/// action-major lookahead targets:
///   min (Phi r)(i)  s.t.  W'(stacked Phi) r >= W' targets,  r in chi.
/// Componentwise below lub_project for the same box.
inline ProjectionResult alub_project(const MdpModel& model, const FeatureMatrix& f,
                                     const ConstraintAggregator& agg, const Box& box,
                                     const ValueFunction& j) {
    check(f.states() == model.num_states, "alub_project: feature size mismatch");
    const int n = model.num_states, d = model.num_actions, k = f.count();
    agg.validate();
    check(agg.rows() == n * d, "alub_project: aggregator size mismatch");

    std::vector<numvec> q = bellman_targets(model, j);
    numvec stacked(static_cast<size_t>(n) * d);
    for (int a = 0; a < d; ++a)
        for (int s = 0; s < n; ++s) stacked[static_cast<size_t>(a) * n + s] = q[a][s];

    Matrix phi_stack(n * d, k);
    for (int a = 0; a < d; ++a)
        for (int s = 0; s < n; ++s)
            for (int c = 0; c < k; ++c) phi_stack(a * n + s, c) = f.phi(s, c);

    Matrix rows = aggregate_rows(agg, phi_stack);
    numvec rhs = aggregate_vector(agg, stacked);
    return detail::project_coordinates(f, rows, rhs, box);
}

/// Fixed point of a projection operator by straight iteration. The stopping
/// test ||V_{t+1} - V_t||_inf <= tol (1 - alpha) together with the operator's
/// contraction bounds the returned iterate's own residual by the same amount.
template <typename Projector>
ValueFunction fixed_point(Projector&& project, double alpha, ValueFunction v0, double tol,
                          int max_iter = 10000) {
    check(tol > 0.0, "fixed_point: tolerance must be positive");
    const double stop = tol * (1.0 - alpha);
    double residual = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        ValueFunction next = project(v0);
        residual = inf_dist(next, v0);
        v0 = std::move(next);
        if (residual <= stop) return v0;
    }
    throw std::runtime_error("fixed_point: iteration cap reached, residual " +
                             std::to_string(residual));
}

/// Projection of the exact optimal value function; the anchor point of the
/// error analysis.
inline ProjectionResult lub_of_optimal(const MdpModel& model, const FeatureMatrix& f,
                                       const Box& box, const ValueFunction& jstar) {
    return lub_project(model, f, box, jstar);
}

} // namespace grlp
