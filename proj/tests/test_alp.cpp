#include <catch_amalgamated.hpp>

#include "grlp/alp.hpp"
#include "grlp/mdp.hpp"
#include "grlp/random_models.hpp"

using namespace grlp;

namespace {

MdpModel self_loop(double g, double alpha) {
    Matrix p(1, 1);
    p(0, 0) = 1.0;
    return MdpModel::from_dense({p}, {numvec{g}}, alpha);
}

} // namespace

TEST_CASE("feature matrix validation") {
    Matrix ok(3, 2);
    for (int s = 0; s < 3; ++s) {
        ok(s, 0) = 1.0;
        ok(s, 1) = s;
    }
    REQUIRE_NOTHROW(FeatureMatrix::plain(ok));

    Matrix bad_first = ok;
    bad_first(1, 0) = 0.5;
    CHECK_THROWS_AS(FeatureMatrix::plain(bad_first), std::invalid_argument);

    Matrix rank_def(3, 2);
    for (int s = 0; s < 3; ++s) {
        rank_def(s, 0) = 1.0;
        rank_def(s, 1) = 3.0;
    }
    CHECK_THROWS_AS(FeatureMatrix::plain(rank_def), std::invalid_argument);
}

TEST_CASE("constraint system on a single self-loop state") {
    MdpModel m = self_loop(2.0, 0.5);
    Matrix phi(1, 1);
    phi(0, 0) = 1.0;
    AlpSystem sys = build_alp_constraints(m, FeatureMatrix::plain(phi));
    REQUIRE(sys.a.rows == 1);
    CHECK(sys.a(0, 0) == Catch::Approx(0.5)); // (1 - alpha) on the ones column
    CHECK(sys.b_offset[0] == Catch::Approx(2.0));
}

TEST_CASE("identity features reproduce the raw stacked system") {
    Rng rng(5);
    MdpModel m = random_mdp(rng, 4, 2);
    Matrix phi(4, 4);
    for (int s = 0; s < 4; ++s) {
        phi(s, 0) = 1.0;
        for (int j = 1; j < 4; ++j) phi(s, j) = (s == j) ? 1.0 : 0.0;
    }
    FeatureMatrix f = FeatureMatrix::plain(phi);
    AlpSystem sys = build_alp_constraints(m, f);
    REQUIRE(sys.a.rows == 8);
    for (int a = 0; a < 2; ++a)
        for (int s = 0; s < 4; ++s) {
            const int row = a * 4 + s;
            // row of (I - alpha P_a) Phi, checked entry by entry
            for (int j = 0; j < 4; ++j) {
                double expect = phi(s, j);
                for (const Transition& t : m.kernel[a][s])
                    expect -= m.alpha * t.prob * phi(t.to, j);
                CHECK(sys.a(row, j) == Catch::Approx(expect).margin(1e-12));
            }
            CHECK(sys.b_offset[row] == Catch::Approx(m.reward[a][s]));
        }
}

TEST_CASE("system rows certify feasibility exactly like the operator") {
    Rng rng(23);
    MdpModel m = random_mdp(rng, 5, 2);
    FeatureMatrix f = random_features(rng, 5, 2);
    AlpSystem sys = build_alp_constraints(m, f);
    for (int t = 0; t < 20; ++t) {
        numvec r{rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)};
        numvec values = f.apply(r);
        std::vector<numvec> q = bellman_targets(m, values);
        bool by_rows = true, by_operator = true;
        for (int a = 0; a < 2; ++a)
            for (int s = 0; s < 5; ++s) {
                double lhs = 0.0;
                for (int j = 0; j < 2; ++j) lhs += sys.a(a * 5 + s, j) * r[j];
                by_rows &= lhs >= sys.b_offset[a * 5 + s] - 1e-10;
                by_operator &= values[s] >= q[a][s] - 1e-10;
            }
        CHECK(by_rows == by_operator);
    }
}

TEST_CASE("exact solve equals value iteration") {
    MdpModel m = self_loop(2.0, 0.5);
    numvec j = solve_exact_lp(m, StateWeights::uniform(1));
    CHECK(j[0] == Catch::Approx(4.0).margin(1e-8));

    Rng rng(29);
    for (int t = 0; t < 5; ++t) {
        MdpModel r = random_mdp(rng, 6, 2);
        numvec lp = solve_exact_lp(r, random_state_weights(rng, 6));
        numvec vi = value_iteration(r, 1e-9);
        CHECK(inf_dist(lp, vi) <= 1e-6);
    }
}

TEST_CASE("feature-restricted solve closed forms") {
    Box box; // default 1e6

    // representable case: optimal value function inside the span
    Rng rng(31);
    MdpModel m = random_mdp(rng, 5, 2);
    numvec jstar = value_iteration(m, 1e-10);
    Matrix phi(5, 2);
    for (int s = 0; s < 5; ++s) {
        phi(s, 0) = 1.0;
        phi(s, 1) = jstar[s];
    }
    FeatureMatrix f = FeatureMatrix::plain(phi);
    WeightedFit alp = solve_alp(m, f, random_state_weights(rng, 5), box);
    CHECK(inf_dist(alp.values, jstar) <= 1e-6);

    // ones-only basis: optimum is max_{s,a} g_a(s) / (1 - alpha)
    Matrix ones(5, 1);
    for (int s = 0; s < 5; ++s) ones(s, 0) = 1.0;
    FeatureMatrix fo = FeatureMatrix::plain(ones);
    WeightedFit flat = solve_alp(m, fo, StateWeights::uniform(5), box);
    double gmax = -1e300;
    for (int a = 0; a < 2; ++a)
        for (int s = 0; s < 5; ++s) gmax = std::max(gmax, m.reward[a][s]);
    CHECK(flat.coeffs[0] == Catch::Approx(gmax / (1.0 - m.alpha)).margin(1e-7));
}

TEST_CASE("aggregated solve special cases") {
    Rng rng(37);
    MdpModel m = random_mdp(rng, 4, 2);
    FeatureMatrix f = random_features(rng, 4, 2);
    StateWeights w = random_state_weights(rng, 4);
    Box box;

    // identity aggregation reproduces the unaggregated optimum
    indvec all_rows(8);
    for (int i = 0; i < 8; ++i) all_rows[i] = i;
    ConstraintAggregator identity = selection_w(all_rows, 8);
    WeightedFit alp = solve_alp(m, f, w, box);
    WeightedFit same = solve_grlp(m, f, identity, w, box);
    double oa = 0.0, os = 0.0;
    for (int s = 0; s < 4; ++s) {
        oa += w.c[s] * alp.values[s];
        os += w.c[s] * same.values[s];
    }
    CHECK(os == Catch::Approx(oa).margin(1e-8));

    // single all-ones aggregate with the ones basis: one-row closed form
    Matrix ones(4, 1);
    for (int s = 0; s < 4; ++s) ones(s, 0) = 1.0;
    FeatureMatrix fo = FeatureMatrix::plain(ones);
    ConstraintAggregator pool;
    pool.kind = WKind::Aggregation;
    pool.w = Matrix(8, 1, 1.0);
    double gsum = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int s = 0; s < 4; ++s) gsum += m.reward[a][s];
    WeightedFit pooled = solve_grlp(m, fo, pool, StateWeights::uniform(4), box);
    CHECK(pooled.coeffs[0] == Catch::Approx(gsum / ((1.0 - m.alpha) * 8)).margin(1e-7));
}

TEST_CASE("aggregator constructors") {
    // selection: rows (0,3) of a 4-row system
    ConstraintAggregator sel = selection_w({0, 3}, 4);
    CHECK(sel.w(0, 0) == 1.0);
    CHECK(sel.w(3, 1) == 1.0);
    double total = 0.0;
    for (double v : sel.w.data) total += v;
    CHECK(total == 2.0);
    CHECK_THROWS_AS(selection_w({4}, 4), std::invalid_argument);

    // adjacent-state aggregation, small exact pattern: n=4, d=2, m=2
    ConstraintAggregator agg = aggregation_w(4, 2, 2);
    const std::vector<std::pair<int, int>> expected_ones{
        {0, 0}, {1, 0}, {4, 0}, {5, 0}, {2, 1}, {3, 1}, {6, 1}, {7, 1}};
    for (auto [r, c] : expected_ones) CHECK(agg.w(r, c) == 1.0);
    total = 0.0;
    for (double v : agg.w.data) total += v;
    CHECK(total == 8.0);
    CHECK_THROWS_AS(aggregation_w(10, 2, 3), std::invalid_argument);

    // n=10, d=2, m=5: 20 x 5 with four ones per column
    ConstraintAggregator qsw = aggregation_w(10, 2, 5);
    CHECK(qsw.w.rows == 20);
    CHECK(qsw.w.cols == 5);
    for (int j = 0; j < 5; ++j) {
        double col = 0.0;
        for (int i = 0; i < 20; ++i) col += qsw.w(i, j);
        CHECK(col == 4.0);
        CHECK(qsw.w(2 * j, j) == 1.0);
        CHECK(qsw.w(2 * j + 1, j) == 1.0);
        CHECK(qsw.w(10 + 2 * j, j) == 1.0);
        CHECK(qsw.w(10 + 2 * j + 1, j) == 1.0);
    }

    // sampling: point mass selects the same row every time
    numvec point(6, 0.0);
    point[4] = 1.0;
    ConstraintAggregator pt = sampled_w(point, 3, 99);
    for (int j = 0; j < 3; ++j) CHECK(pt.w(4, j) == 1.0);

    // random: entries in (0,1), same seed reproduces bit-identically
    ConstraintAggregator r1 = random_w(6, 3, 123);
    ConstraintAggregator r2 = random_w(6, 3, 123);
    CHECK(r1.w.data == r2.w.data);
    for (double v : r1.w.data) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
}
