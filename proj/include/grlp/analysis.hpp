// Error analysis of the aggregated program: best sup-norm projection error,
// the aggregation error term measured between the two projection operators,
// the resulting performance bound, weighted L1 errors and the optimal
// multipliers of the exact program.

#pragma once

#include <optional>

#include "grlp/alp.hpp"
#include "grlp/definitions.hpp"
#include "grlp/mdp.hpp"
#include "grlp/projection.hpp"

namespace grlp {

inline double weighted_l1_error(const numvec& x, const numvec& y, const StateWeights& w) {
    check(x.size() == y.size() && x.size() == w.c.size(),
          "weighted_l1_error: length mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < x.size(); ++i) acc += w.c[i] * std::abs(x[i] - y[i]);
    return acc;
}

/// Right-hand side of the aggregated-program performance bound:
/// (6 eps* + 2 e_T) / (1 - alpha).
inline double grlp_error_bound(double eps_star, double e_t, double alpha) {
    check(eps_star >= 0.0 && e_t >= 0.0, "grlp_error_bound: negative inputs");
    check(alpha > 0.0 && alpha < 1.0, "grlp_error_bound: discount out of range");
    return (6.0 * eps_star + 2.0 * e_t) / (1.0 - alpha);
}

struct EtBreakdown {
    double e_t = 0.0;          // sup-norm gap between the two projections
    numvec anchor;             // projection of the optimal value function
    numvec lub_of_anchor;      // exact projection applied to the anchor
    numvec alub_of_anchor;     // aggregated projection applied to the anchor
    bool lub_clipped = false;  // box interference on the exact side (a fault)
};

/// Measures the aggregation error: project the optimal value function, apply
/// both operators to the result, and take the sup-norm gap. The aggregated
/// side may ride the box by definition; the exact side must not, and that is
/// what lub_clipped reports.
inline EtBreakdown et_term(const MdpModel& model, const FeatureMatrix& f,
                           const ConstraintAggregator& agg, const Box& box,
                           const ValueFunction& jstar) {
    check(static_cast<long>(model.num_states) * model.num_actions <= 100000,
          "et_term: guard n*d <= 1e5 exceeded");
    EtBreakdown out;
    ProjectionResult anchor = lub_of_optimal(model, f, box, jstar);
    out.anchor = anchor.values;
    ProjectionResult lub = lub_project(model, f, box, out.anchor);
    ProjectionResult alub = alub_project(model, f, agg, box, out.anchor);
    out.lub_clipped = anchor.box_clipped || lub.box_clipped;
    out.lub_of_anchor = lub.values;
    out.alub_of_anchor = alub.values;
    double worst = 0.0;
    for (int i = 0; i < model.num_states; ++i)
        worst = std::max(worst, std::abs(lub.values[i] - alub.values[i]));
    out.e_t = worst;
    return out;
}

/// Optimal multipliers of the exact program: the discounted number of visits
/// to (s, u*(s)) starting from c, zero off the optimal action. Action-major
/// layout; total mass 1/(1-alpha).
inline numvec optimal_lagrange(const MdpModel& model, const StateWeights& weights,
                               const Policy& ustar) {
    check(model.num_states <= 2000, "optimal_lagrange: guard n <= 2000 exceeded");
    weights.validate();
    check_policy(model, ustar);
    check(static_cast<int>(weights.c.size()) == model.num_states,
          "optimal_lagrange: weight length mismatch");
    const int n = model.num_states;
    // solve (I - alpha P_u)' x = c
    Matrix a(n, n);
    for (int s = 0; s < n; ++s) {
        a(s, s) += 1.0;
        for (const Transition& t : model.kernel[ustar[s]][s])
            a(t.to, s) -= model.alpha * t.prob;
    }
    numvec x = detail::solve_dense(std::move(a), weights.c);
    numvec lambda(static_cast<size_t>(n) * model.num_actions, 0.0);
    for (int s = 0; s < n; ++s)
        lambda[static_cast<size_t>(ustar[s]) * n + s] = x[s];
    return lambda;
}

struct ErrorReport {
    double eps_star = 0.0;             // best sup-norm fit error of J*
    std::optional<double> e_t;         // aggregation error (absent if guarded off)
    std::optional<double> bound_rhs;   // (6 eps* + 2 e_T)/(1-alpha)
    double l1c_error = 0.0;            // ||J* - Jhat||_{1,c}
    bool box_clipped = false;          // any solution program rode the box
    bool bound_holds = true;
};

/// End-to-end assembly: exact value function, best fit, aggregated solve,
/// both projections, and the bound check. Violations of the bound without
/// box interference indicate a defect and throw.
inline ErrorReport error_report(const MdpModel& model, const FeatureMatrix& f,
                                const ConstraintAggregator& agg, const StateWeights& weights,
                                const Box& box, double vi_tol = 1e-9) {
    ErrorReport rep;
    ValueFunction jstar = value_iteration(model, vi_tol);
    ChebyshevFit fit = chebyshev_fit(f.phi, jstar);
    rep.eps_star = fit.eps;
    WeightedFit grlp = solve_grlp(model, f, agg, weights, box);
    rep.box_clipped = (grlp.status == LpStatus::BoxClipped);
    rep.l1c_error = weighted_l1_error(jstar, grlp.values, weights);
    if (static_cast<long>(model.num_states) * model.num_actions <= 100000) {
        EtBreakdown et = et_term(model, f, agg, box, jstar);
        rep.e_t = et.e_t;
        rep.box_clipped |= et.lub_clipped;
        rep.bound_rhs = grlp_error_bound(rep.eps_star, et.e_t, model.alpha);
        rep.bound_holds = rep.l1c_error <= *rep.bound_rhs + 1e-6 * (1.0 + *rep.bound_rhs);
        if (!rep.bound_holds && !rep.box_clipped)
            throw std::logic_error("error_report: performance bound violated: " +
                                   std::to_string(rep.l1c_error) + " > " +
                                   std::to_string(*rep.bound_rhs));
    }
    return rep;
}

} // namespace grlp
