#include <catch_amalgamated.hpp>

#include "grlp/analysis.hpp"
#include "grlp/queue.hpp"
#include "grlp/random_models.hpp"

using namespace grlp;

TEST_CASE("weighted L1 error") {
    StateWeights w = StateWeights::uniform(2);
    CHECK(weighted_l1_error({1.0, -1.0}, {0.0, 0.0}, w) == Catch::Approx(1.0));
    CHECK(weighted_l1_error({3.0, 3.0}, {3.0, 3.0}, w) == 0.0);
}

TEST_CASE("error bound arithmetic") {
    CHECK(grlp_error_bound(0.0, 0.0, 0.5) == 0.0);
    CHECK(grlp_error_bound(1.0, 1.0, 0.5) == Catch::Approx(16.0));
    CHECK_THROWS_AS(grlp_error_bound(-1.0, 0.0, 0.5), std::invalid_argument);
}

TEST_CASE("aggregation error vanishes for the identity aggregator") {
    Rng rng(83);
    MdpModel m = random_mdp(rng, 5, 2);
    FeatureMatrix f = random_features(rng, 5, 2);
    numvec jstar = value_iteration(m, 1e-10);
    indvec all_rows(10);
    for (int i = 0; i < 10; ++i) all_rows[i] = i;
    EtBreakdown et = et_term(m, f, selection_w(all_rows, 10), Box{}, jstar);
    CHECK(et.e_t <= 1e-8);
    CHECK_FALSE(et.lub_clipped);
}

TEST_CASE("multipliers of the exact program") {
    Matrix p(1, 1);
    p(0, 0) = 1.0;
    MdpModel m = MdpModel::from_dense({p}, {numvec{1.0}}, 0.98);
    numvec lam = optimal_lagrange(m, StateWeights::uniform(1), Policy{0});
    CHECK(lam[0] == Catch::Approx(50.0).margin(1e-9));

    // point mass at state 0, small discount: mass stays near the start
    Rng rng(89);
    MdpModel r = random_mdp(rng, 4, 2, 0.05, 0.1);
    StateWeights point{numvec{1.0, 0.0, 0.0, 0.0}};
    Policy u = greedy_policy(r, value_iteration(r, 1e-10));
    numvec lam2 = optimal_lagrange(r, point, u);
    double at0 = lam2[static_cast<size_t>(u[0]) * 4 + 0];
    CHECK(at0 == Catch::Approx(1.0).margin(2.0 * r.alpha));

    // queue instance: total mass identity and off-policy zeros
    QueueConfig cfg;
    cfg.q = {0.2, 0.4};
    MdpModel qs = build_queue_mdp(cfg);
    numvec jstar = value_iteration(qs, 1e-10);
    Policy ustar = greedy_policy(qs, jstar);
    numvec lam3 = optimal_lagrange(qs, StateWeights::uniform(10), ustar);
    double mass = 0.0;
    for (double v : lam3) mass += v;
    CHECK(mass == Catch::Approx(50.0).margin(1e-6));
    for (int a = 0; a < 2; ++a)
        for (int s = 0; s < 10; ++s)
            if (a != ustar[s]) CHECK(lam3[static_cast<size_t>(a) * 10 + s] == 0.0);
}

TEST_CASE("full report on a representable instance") {
    Rng rng(97);
    MdpModel m = random_mdp(rng, 5, 2);
    numvec jstar = value_iteration(m, 1e-10);
    Matrix phi(5, 2);
    for (int s = 0; s < 5; ++s) {
        phi(s, 0) = 1.0;
        phi(s, 1) = jstar[s];
    }
    FeatureMatrix f = FeatureMatrix::plain(phi);
    indvec all_rows(10);
    for (int i = 0; i < 10; ++i) all_rows[i] = i;
    ErrorReport rep = error_report(m, f, selection_w(all_rows, 10),
                                   StateWeights::uniform(5), Box{});
    CHECK(rep.eps_star <= 1e-7);
    REQUIRE(rep.e_t.has_value());
    CHECK(*rep.e_t <= 1e-7);
    CHECK(rep.l1c_error <= 1e-5);
    CHECK(rep.bound_holds);
    CHECK_FALSE(rep.box_clipped);
}

TEST_CASE("report inequality holds across random instances") {
    Rng rng(101);
    for (int t = 0; t < 25; ++t) {
        const int n = 3 + rng.below(5);
        const int d = 1 + rng.below(3);
        const int k = 1 + rng.below(std::min(3, n));
        MdpModel m = random_mdp(rng, n, d);
        FeatureMatrix f = random_features(rng, n, k);
        ConstraintAggregator agg = random_coverage_aggregator(rng, n, d);
        StateWeights w = random_state_weights(rng, n);
        ErrorReport rep = error_report(m, f, agg, w, Box{});
        REQUIRE(rep.e_t.has_value());
        CHECK(rep.bound_holds);
        CHECK(rep.l1c_error <= *rep.bound_rhs + 1e-6);
    }
}
