// Randomized invariant suite: runs every operator law and bound the library
// relies on against seeded random instances and reports per-invariant pass
// counts. Used by the command-line driver and by the test suites.

#pragma once

#include <functional>

#include "grlp/analysis.hpp"
#include "grlp/projection.hpp"
#include "grlp/random_models.hpp"

namespace grlp {

struct PropertyConfig {
    int trials = 100;
    uint64_t seed = 20240501;
    int max_states = 10;
    int max_actions = 3;
    int max_features = 3;
    double box_halfwidth = 1e6;
};

struct PropertyResult {
    std::string name;
    int passed = 0;
    int failed = 0;
    double worst = 0.0; // largest observed violation magnitude
};

struct PropertyReport {
    std::vector<PropertyResult> results;
    bool all_passed() const {
        for (const auto& r : results)
            if (r.failed > 0) return false;
        return true;
    }
};

namespace detail {

struct PropertyInstance {
    MdpModel model;
    FeatureMatrix features;
    StateWeights weights;
    ConstraintAggregator agg;
    Box box;
    ValueFunction jstar;
};

inline PropertyInstance draw_instance(Rng& rng, const PropertyConfig& cfg) {
    const int n = 3 + rng.below(cfg.max_states - 2);
    const int d = 1 + rng.below(cfg.max_actions);
    const int k = 1 + rng.below(std::min(cfg.max_features, n));
    PropertyInstance inst{random_mdp(rng, n, d),
                          random_features(rng, n, k),
                          random_state_weights(rng, n),
                          random_coverage_aggregator(rng, n, d),
                          Box{cfg.box_halfwidth, Box::Units::Coefficient},
                          {}};
    inst.jstar = value_iteration(inst.model, 1e-10);
    return inst;
}

} // namespace detail

inline PropertyReport run_property_suite(const PropertyConfig& cfg) {
    using detail::PropertyInstance;

    struct Check {
        std::string name;
        std::function<double(Rng&, const PropertyInstance&)> violation; // <=0 passes
    };

    auto chain_values = [](const PropertyInstance& in) {
        struct Out {
            WeightedFit alp, grlp;
            ValueFunction vt, vh;
        } o;
        o.alp = solve_alp(in.model, in.features, in.weights, in.box);
        o.grlp = solve_grlp(in.model, in.features, in.agg, in.weights, in.box);
        auto lub = [&](const ValueFunction& v) {
            return lub_project(in.model, in.features, in.box, v).values;
        };
        auto alub = [&](const ValueFunction& v) {
            return alub_project(in.model, in.features, in.agg, in.box, v).values;
        };
        o.vt = fixed_point(lub, in.model.alpha, numvec(in.model.num_states, 0.0), 1e-7);
        o.vh = fixed_point(alub, in.model.alpha, numvec(in.model.num_states, 0.0), 1e-7);
        return o;
    };

    std::vector<Check> checks;

    checks.push_back({"model_validation_rejects_bad_rows", [](Rng& rng, const PropertyInstance& in) {
        MdpModel bad = in.model;
        int s = rng.below(bad.num_states);
        bad.kernel[0][s].front().prob *= 0.9; // row sum 0.9-ish
        try {
            bad.validate();
            return 1.0;
        } catch (const std::invalid_argument&) {
            return -1.0;
        }
    }});

    checks.push_back({"bellman_monotonicity", [](Rng& rng, const PropertyInstance& in) {
        numvec j2 = random_value(rng, in.model.num_states);
        numvec j1 = j2;
        for (double& x : j1) x += rng.uniform();
        numvec t1 = bellman_apply(in.model, j1), t2 = bellman_apply(in.model, j2);
        double worst = 0.0;
        for (int s = 0; s < in.model.num_states; ++s)
            worst = std::max(worst, t2[s] - t1[s]);
        return worst - 1e-10;
    }});

    checks.push_back({"bellman_shift", [](Rng& rng, const PropertyInstance& in) {
        numvec j = random_value(rng, in.model.num_states);
        const double kshift = rng.uniform(-3.0, 3.0);
        numvec js = j;
        for (double& x : js) x += kshift;
        numvec lhs = bellman_apply(in.model, js);
        numvec rhs = bellman_apply(in.model, j);
        for (double& x : rhs) x += in.model.alpha * kshift;
        return inf_dist(lhs, rhs) - 1e-10;
    }});

    checks.push_back({"bellman_contraction", [](Rng& rng, const PropertyInstance& in) {
        numvec j1 = random_value(rng, in.model.num_states);
        numvec j2 = random_value(rng, in.model.num_states);
        double lhs = inf_dist(bellman_apply(in.model, j1), bellman_apply(in.model, j2));
        return lhs - in.model.alpha * inf_dist(j1, j2) - 1e-10;
    }});

    checks.push_back({"value_iteration_residual", [](Rng&, const PropertyInstance& in) {
        const double tol = 1e-6;
        numvec j = value_iteration(in.model, tol);
        return inf_dist(j, bellman_apply(in.model, j)) - 2.0 * tol;
    }});

    checks.push_back({"greedy_policy_is_optimal", [](Rng&, const PropertyInstance& in) {
        Policy u = greedy_policy(in.model, in.jstar);
        numvec ju = policy_evaluate(in.model, u);
        return inf_dist(ju, in.jstar) - 1e-6;
    }});

    checks.push_back({"alp_feasible_point_stays_grlp_feasible",
                      [](Rng& rng, const PropertyInstance& in) {
        AlpSystem sys = build_alp_constraints(in.model, in.features);
        // start from the restricted solution and push it upward along ones
        WeightedFit alp = solve_alp(in.model, in.features, in.weights, in.box);
        numvec r = alp.coeffs;
        r[0] += rng.uniform(0.0, 2.0); // first column is all ones: stays feasible
        Matrix wa = aggregate_rows(in.agg, sys.a);
        numvec wb = aggregate_vector(in.agg, sys.b_offset);
        double worst = 0.0;
        for (int i = 0; i < wa.rows; ++i) {
            double lhs = 0.0;
            for (int j = 0; j < wa.cols; ++j) lhs += wa(i, j) * r[j];
            worst = std::max(worst, wb[i] - lhs);
        }
        return worst - 1e-6 * (1.0 + inf_norm(wb));
    }});

    checks.push_back({"grlp_objective_below_alp", [&](Rng&, const PropertyInstance& in) {
        auto o = chain_values(in);
        double alp_obj = 0.0, grlp_obj = 0.0;
        for (int s = 0; s < in.model.num_states; ++s) {
            alp_obj += in.weights.c[s] * o.alp.values[s];
            grlp_obj += in.weights.c[s] * o.grlp.values[s];
        }
        return grlp_obj - alp_obj - 1e-7 * (1.0 + std::abs(alp_obj));
    }});

    checks.push_back({"selection_equals_row_subset", [](Rng& rng, const PropertyInstance& in) {
        AlpSystem sys = build_alp_constraints(in.model, in.features);
        const int nd = sys.a.rows;
        // random subset that always covers one row per state under one policy
        indvec rows;
        for (int s = 0; s < in.model.num_states; ++s)
            rows.push_back(rng.below(in.model.num_actions) * in.model.num_states + s);
        const int extra = rng.below(nd + 1 - static_cast<int>(rows.size()));
        for (int e = 0; e < extra; ++e) rows.push_back(rng.below(nd));
        ConstraintAggregator sel = selection_w(rows, nd);
        WeightedFit grlp = solve_grlp(in.model, in.features, sel, in.weights, in.box);
        // direct row-subset program
        Matrix sub(static_cast<int>(rows.size()), sys.a.cols);
        numvec sb(rows.size());
        for (size_t i = 0; i < rows.size(); ++i) {
            for (int j = 0; j < sys.a.cols; ++j) sub(static_cast<int>(i), j) = sys.a(rows[i], j);
            sb[i] = sys.b_offset[rows[i]];
        }
        WeightedFit direct =
            solve_restricted(in.model, in.features, sub, sb, in.weights, in.box);
        double og = 0.0, od = 0.0;
        for (int s = 0; s < in.model.num_states; ++s) {
            og += in.weights.c[s] * grlp.values[s];
            od += in.weights.c[s] * direct.values[s];
        }
        return std::abs(og - od) - 1e-9 * (1.0 + std::abs(od));
    }});

    checks.push_back({"alp_l1c_bound", [](Rng&, const PropertyInstance& in) {
        WeightedFit alp = solve_alp(in.model, in.features, in.weights, in.box);
        ChebyshevFit fit = chebyshev_fit(in.features.phi, in.jstar);
        double lhs = weighted_l1_error(in.jstar, alp.values, in.weights);
        double rhs = 2.0 / (1.0 - in.model.alpha) * fit.eps;
        return lhs - rhs - 1e-6 * (1.0 + rhs);
    }});

    checks.push_back({"projection_dominates_lookahead", [](Rng& rng, const PropertyInstance& in) {
        numvec j = random_value(rng, in.model.num_states);
        numvec t = bellman_apply(in.model, j);
        numvec g = lub_project(in.model, in.features, in.box, j).values;
        double worst = 0.0;
        for (int s = 0; s < in.model.num_states; ++s) worst = std::max(worst, t[s] - g[s]);
        return worst - 1e-8;
    }});

    checks.push_back({"alub_below_lub", [](Rng& rng, const PropertyInstance& in) {
        numvec j = random_value(rng, in.model.num_states);
        numvec g = lub_project(in.model, in.features, in.box, j).values;
        numvec a = alub_project(in.model, in.features, in.agg, in.box, j).values;
        double worst = 0.0;
        for (int s = 0; s < in.model.num_states; ++s) worst = std::max(worst, a[s] - g[s]);
        return worst - 1e-8;
    }});

    auto projection_monotonicity = [](bool aggregated) {
        return [aggregated](Rng& rng, const PropertyInstance& in) {
            numvec j2 = random_value(rng, in.model.num_states);
            numvec j1 = j2;
            for (double& x : j1) x += rng.uniform();
            auto proj = [&](const numvec& v) {
                return aggregated
                           ? alub_project(in.model, in.features, in.agg, in.box, v).values
                           : lub_project(in.model, in.features, in.box, v).values;
            };
            numvec p1 = proj(j1), p2 = proj(j2);
            double worst = 0.0;
            for (int s = 0; s < in.model.num_states; ++s)
                worst = std::max(worst, p2[s] - p1[s]);
            return worst - 1e-8;
        };
    };
    checks.push_back({"lub_monotonicity", projection_monotonicity(false)});
    checks.push_back({"alub_monotonicity", projection_monotonicity(true)});

    auto projection_shift = [](bool aggregated) {
        return [aggregated](Rng& rng, const PropertyInstance& in) {
            numvec j = random_value(rng, in.model.num_states);
            const double kshift = rng.uniform(-3.0, 3.0);
            numvec js = j;
            for (double& x : js) x += kshift;
            auto proj = [&](const numvec& v) {
                return aggregated
                           ? alub_project(in.model, in.features, in.agg, in.box, v).values
                           : lub_project(in.model, in.features, in.box, v).values;
            };
            numvec lhs = proj(js);
            numvec rhs = proj(j);
            for (double& x : rhs) x += in.model.alpha * kshift;
            return inf_dist(lhs, rhs) - 1e-8;
        };
    };
    checks.push_back({"lub_shift", projection_shift(false)});
    checks.push_back({"alub_shift", projection_shift(true)});

    auto projection_contraction = [](bool aggregated) {
        return [aggregated](Rng& rng, const PropertyInstance& in) {
            numvec j1 = random_value(rng, in.model.num_states);
            numvec j2 = random_value(rng, in.model.num_states);
            auto proj = [&](const numvec& v) {
                return aggregated
                           ? alub_project(in.model, in.features, in.agg, in.box, v).values
                           : lub_project(in.model, in.features, in.box, v).values;
            };
            double lhs = inf_dist(proj(j1), proj(j2));
            return lhs - in.model.alpha * inf_dist(j1, j2) - 1e-8;
        };
    };
    checks.push_back({"lub_contraction", projection_contraction(false)});
    checks.push_back({"alub_contraction", projection_contraction(true)});

    checks.push_back({"ordering_chain", [&](Rng&, const PropertyInstance& in) {
        auto o = chain_values(in);
        double worst = 0.0;
        for (int s = 0; s < in.model.num_states; ++s) {
            worst = std::max(worst, o.vt[s] - o.alp.values[s]); // Vt <= Jalp
            worst = std::max(worst, in.jstar[s] - o.vt[s]);     // J* <= Vt
            worst = std::max(worst, o.vh[s] - o.grlp.values[s]); // Vh <= Jgrlp
        }
        return worst - 1e-6;
    }});

    checks.push_back({"lub_fixed_point_dominates_lookahead",
                      [&](Rng&, const PropertyInstance& in) {
        auto lub = [&](const ValueFunction& v) {
            return lub_project(in.model, in.features, in.box, v).values;
        };
        numvec vt = fixed_point(lub, in.model.alpha, numvec(in.model.num_states, 0.0), 1e-7);
        numvec tvt = bellman_apply(in.model, vt);
        double worst = 0.0;
        for (int s = 0; s < in.model.num_states; ++s)
            worst = std::max(worst, tvt[s] - vt[s]);
        return worst - 1e-6;
    }});

    checks.push_back({"fixed_point_error_bounds", [&](Rng&, const PropertyInstance& in) {
        auto o = chain_values(in);
        numvec anchor = lub_of_optimal(in.model, in.features, in.box, in.jstar).values;
        double anchor_err = inf_dist(in.jstar, anchor);
        EtBreakdown et = et_term(in.model, in.features, in.agg, in.box, in.jstar);
        double slack = 1e-6;
        double v1 = inf_dist(in.jstar, o.vt) - anchor_err / (1.0 - in.model.alpha) - slack;
        double v2 = inf_dist(in.jstar, o.vh) -
                    (anchor_err + et.e_t) / (1.0 - in.model.alpha) - slack;
        return std::max(v1, v2);
    }});

    checks.push_back({"anchor_within_twice_best_fit", [](Rng&, const PropertyInstance& in) {
        numvec anchor = lub_of_optimal(in.model, in.features, in.box, in.jstar).values;
        ChebyshevFit fit = chebyshev_fit(in.features.phi, in.jstar);
        return inf_dist(in.jstar, anchor) - 2.0 * fit.eps - 1e-7 * (1.0 + fit.eps);
    }});

    checks.push_back({"performance_bound", [](Rng&, const PropertyInstance& in) {
        ErrorReport rep = error_report(in.model, in.features, in.agg, in.weights, in.box);
        if (rep.box_clipped) return 0.0; // downgraded to a warning by design
        return rep.bound_holds ? -1.0 : 1.0;
    }});

    checks.push_back({"l1c_below_sup_norm", [](Rng& rng, const PropertyInstance& in) {
        numvec x = random_value(rng, in.model.num_states);
        numvec y = random_value(rng, in.model.num_states);
        double l1c = weighted_l1_error(x, y, in.weights);
        return l1c - inf_dist(x, y) - 1e-12;
    }});

    checks.push_back({"lagrange_mass_and_support", [](Rng&, const PropertyInstance& in) {
        Policy u = greedy_policy(in.model, in.jstar);
        numvec lam = optimal_lagrange(in.model, in.weights, u);
        double mass = 0.0;
        for (double v : lam) mass += v;
        double worst = std::abs(mass - 1.0 / (1.0 - in.model.alpha));
        for (int a = 0; a < in.model.num_actions; ++a)
            for (int s = 0; s < in.model.num_states; ++s)
                if (a != u[s])
                    worst = std::max(worst, std::abs(lam[static_cast<size_t>(a) *
                                                         in.model.num_states + s]));
        return worst - 1e-8;
    }});

    checks.push_back({"lp_weak_duality_and_determinism", [](Rng& rng, const PropertyInstance&) {
        const int k = 1 + rng.below(3);
        const int m = rng.below(6);
        DenseLp lp;
        lp.c.assign(k, 0.0);
        for (double& v : lp.c) v = rng.uniform(-1.0, 1.0);
        lp.a = Matrix(m, k);
        lp.b.assign(m, 0.0);
        lp.lower.assign(k, -3.0);
        lp.upper.assign(k, 3.0);
        numvec interior(k);
        for (double& v : interior) v = rng.uniform(-1.0, 1.0);
        for (int i = 0; i < m; ++i) {
            double lhs = 0.0;
            for (int j = 0; j < k; ++j) {
                lp.a(i, j) = rng.uniform(-1.0, 1.0);
                lhs += lp.a(i, j) * interior[j];
            }
            lp.b[i] = lhs - rng.uniform(0.0, 1.0); // feasible by construction
        }
        LpOutcome first = lp_solve(lp);
        LpOutcome second = lp_solve(lp);
        if (first.status == LpStatus::Infeasible) return 1.0;
        if (first.x != second.x) return 1.0; // bit-identical repeat solves
        // random feasible points must not beat the reported optimum
        double worst = -1.0;
        for (int t = 0; t < 20; ++t) {
            numvec y(k);
            for (double& v : y) v = rng.uniform(-3.0, 3.0);
            bool ok = true;
            for (int i = 0; i < m && ok; ++i) {
                double lhs = 0.0;
                for (int j = 0; j < k; ++j) lhs += lp.a(i, j) * y[j];
                ok = lhs >= lp.b[i];
            }
            if (!ok) continue;
            double obj = 0.0;
            for (int j = 0; j < k; ++j) obj += lp.c[j] * y[j];
            worst = std::max(worst, first.value - obj - 1e-7 * (1.0 + std::abs(obj)));
        }
        return worst;
    }});

    PropertyReport report;
    report.results.reserve(checks.size());
    for (const Check& chk : checks) {
        PropertyResult res;
        res.name = chk.name;
        Rng rng(cfg.seed ^ std::hash<std::string>{}(chk.name));
        for (int t = 0; t < cfg.trials; ++t) {
            detail::PropertyInstance inst = detail::draw_instance(rng, cfg);
            const double violation = chk.violation(rng, inst);
            if (violation <= 0.0) {
                ++res.passed;
            } else {
                ++res.failed;
                res.worst = std::max(res.worst, violation);
            }
        }
        report.results.push_back(std::move(res));
    }
    return report;
}

} // namespace grlp
