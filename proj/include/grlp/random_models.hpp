// Seeded generators for randomized test instances: models, feature bases,
// state weights and constraint aggregators. The aggregator generator always
// includes a per-state coverage block (one selected row per state under some
// policy), which keeps the aggregated programs and projections bounded: if
// every (I - alpha P_u) Phi v >= 0 row of a policy u is present, then
// Phi v >= 0 by inverse positivity, so no objective direction can escape.

#pragma once

#include "grlp/alp.hpp"
#include "grlp/definitions.hpp"
#include "grlp/mdp.hpp"

namespace grlp {

inline MdpModel random_mdp(Rng& rng, int n, int d, double alpha_lo = 0.6,
                           double alpha_hi = 0.95) {
    MdpModel m;
    m.num_states = n;
    m.num_actions = d;
    m.alpha = rng.uniform(alpha_lo, alpha_hi);
    m.kernel.resize(d);
    m.reward.resize(d);
    for (int a = 0; a < d; ++a) {
        m.kernel[a].resize(n);
        m.reward[a].assign(n, 0.0);
        for (int s = 0; s < n; ++s) {
            numvec row(n);
            double total = 0.0;
            for (int t = 0; t < n; ++t) {
                const double u = rng.uniform_open();
                row[t] = u * u; // sparse-ish rows
                total += row[t];
            }
            double acc = 0.0;
            for (int t = 0; t < n; ++t) {
                row[t] /= total;
                acc += row[t];
            }
            row[n - 1] += 1.0 - acc; // exact row sum
            for (int t = 0; t < n; ++t)
                if (row[t] != 0.0) m.kernel[a][s].push_back({t, row[t]});
            m.reward[a][s] = rng.uniform(-2.0, 2.0);
        }
    }
    m.validate();
    return m;
}

inline FeatureMatrix random_features(Rng& rng, int n, int k) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        Matrix phi(n, k);
        for (int s = 0; s < n; ++s) {
            phi(s, 0) = 1.0;
            for (int j = 1; j < k; ++j) phi(s, j) = rng.uniform(-1.0, 1.0);
        }
        if (detail::column_rank(phi) == k) return FeatureMatrix::plain(std::move(phi));
    }
    throw std::runtime_error("random_features: could not draw a full-rank basis");
}

inline StateWeights random_state_weights(Rng& rng, int n) {
    StateWeights w;
    w.c.assign(n, 0.0);
    double total = 0.0;
    for (int s = 0; s < n; ++s) {
        w.c[s] = 0.05 + rng.uniform();
        total += w.c[s];
    }
    double acc = 0.0;
    for (int s = 0; s < n; ++s) {
        w.c[s] /= total;
        acc += w.c[s];
    }
    w.c[n - 1] += 1.0 - acc;
    return w;
}

/// Random nonnegative aggregator with m in [n, nd]: a state-coverage block of
/// selected rows (s, a_s) for a random action choice a_s, plus random dense
/// positive columns.
inline ConstraintAggregator random_coverage_aggregator(Rng& rng, int n, int d) {
    const int extras = rng.below(n * d - n + 1);
    const int m = n + extras;
    ConstraintAggregator agg;
    agg.kind = WKind::Random;
    agg.w = Matrix(n * d, m);
    for (int s = 0; s < n; ++s) agg.w(rng.below(d) * n + s, s) = 1.0;
    for (int j = n; j < m; ++j)
        for (int i = 0; i < n * d; ++i) agg.w(i, j) = rng.uniform_open();
    agg.validate();
    return agg;
}

inline ValueFunction random_value(Rng& rng, int n, double scale = 5.0) {
    numvec v(n);
    for (double& x : v) x = rng.uniform(-scale, scale);
    return v;
}

} // namespace grlp
