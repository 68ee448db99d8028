// Single controlled queue with finite buffer: the benchmark model generator,
// polynomial feature bases, and geometric state-relevance weights.

#pragma once

#include "grlp/alp.hpp"
#include "grlp/definitions.hpp"
#include "grlp/mdp.hpp"

namespace grlp {

struct QueueConfig {
    int n = 10;          // buffer size + 1 (states 0 .. n-1)
    double p = 0.2;      // arrival probability
    numvec q;            // per-action service probabilities, nondecreasing
    double alpha = 0.98; // discount
    double zeta = 0.9;   // geometric state-weight decay
    int k = 2;           // feature count
    int m = 5;           // aggregate-constraint count

    int actions() const { return static_cast<int>(q.size()); }

    void validate() const {
        check(n >= 2, "queue: need at least two states");
        check(!q.empty(), "queue: need at least one action");
        check(p > 0.0 && p < 1.0, "queue: arrival probability must be in (0,1)");
        double prev = 0.0;
        for (double qa : q) {
            check(qa > 0.0 && qa < 1.0, "queue: service probability must be in (0,1)");
            check(qa >= prev, "queue: service rates must be nondecreasing");
            prev = qa;
        }
        check(q.back() > p, "queue: fastest service rate must exceed the arrival rate");
        check(zeta > 0.0 && zeta < 1.0, "queue: zeta must be in (0,1)");
        check(alpha > 0.0 && alpha < 1.0, "queue: discount must be in (0,1)");
        check(k >= 1, "queue: need at least one feature");
        check(m >= 1, "queue: need at least one aggregate");
    }
};

/// Builds the birth-death chain: interior states move up with probability p,
/// down with q(a), stay otherwise; the boundary states lose the blocked move.
/// When p + q(a) > 1 the one-event-per-slot reading is impossible, so the
/// interior slot resolves an independent arrival and departure instead:
/// up p(1-q), down q(1-p), stay otherwise. Reward for action a in state s is
/// -(s + 60 q(a)^3).
inline MdpModel build_queue_mdp(const QueueConfig& cfg) {
    cfg.validate();
    const int n = cfg.n, d = cfg.actions();
    MdpModel model;
    model.num_states = n;
    model.num_actions = d;
    model.alpha = cfg.alpha;
    model.kernel.resize(d);
    model.reward.resize(d);
    for (int a = 0; a < d; ++a) {
        const double qa = cfg.q[a];
        double up = cfg.p, down = qa;
        if (cfg.p + qa > 1.0) {
            up = cfg.p * (1.0 - qa);
            down = qa * (1.0 - cfg.p);
        }
        model.kernel[a].resize(n);
        model.reward[a].assign(n, 0.0);
        for (int s = 0; s < n; ++s) {
            model.reward[a][s] = -(s + 60.0 * qa * qa * qa);
            auto& row = model.kernel[a][s];
            if (s == 0) {
                row = {{1, cfg.p}, {0, 1.0 - cfg.p}};
            } else if (s == n - 1) {
                row = {{s - 1, qa}, {s, 1.0 - qa}};
            } else {
                row = {{s - 1, down}, {s, 1.0 - up - down}, {s + 1, up}};
            }
        }
    }
    model.validate();
    return model;
}

/// Powers of the normalized state (s/(n-1))^j for j = 0..k-1. Spans the same
/// value functions as raw powers; column_scale records (n-1)^j so raw-unit
/// boxes resolve exactly.
inline FeatureMatrix polynomial_features(int n, int k) {
    check(k >= 1, "polynomial_features: need at least one column");
    check(n >= 2 || k == 1, "polynomial_features: need n >= 2 for nonconstant columns");
    FeatureMatrix f;
    f.phi = Matrix(n, k);
    f.column_scale.assign(k, 1.0);
    for (int j = 1; j < k; ++j) f.column_scale[j] = f.column_scale[j - 1] * (n - 1);
    for (int s = 0; s < n; ++s) {
        const double x = n > 1 ? static_cast<double>(s) / (n - 1) : 0.0;
        double pw = 1.0;
        for (int j = 0; j < k; ++j) {
            f.phi(s, j) = pw;
            pw *= x;
        }
    }
    f.validate();
    return f;
}

/// Raw powers 1, s, s^2, ... - usable at small n for basis cross-checks.
inline FeatureMatrix raw_polynomial_features(int n, int k) {
    check(k >= 1, "raw_polynomial_features: need at least one column");
    check(n >= 2 || k == 1, "raw_polynomial_features: need n >= 2");
    FeatureMatrix f;
    f.phi = Matrix(n, k);
    f.column_scale.assign(k, 1.0);
    for (int s = 0; s < n; ++s) {
        double pw = 1.0;
        for (int j = 0; j < k; ++j) {
            f.phi(s, j) = pw;
            pw *= s;
        }
    }
    f.validate();
    return f;
}

/// Weights proportional to zeta^s, renormalized to sum exactly to one over
/// the finite range.
inline StateWeights geometric_c(int n, double zeta) {
    check(n >= 1, "geometric_c: need at least one state");
    check(zeta > 0.0 && zeta < 1.0, "geometric_c: zeta must be in (0,1)");
    StateWeights w;
    w.c.assign(n, 0.0);
    double v = 1.0, total = 0.0;
    for (int s = 0; s < n; ++s) {
        w.c[s] = v;
        total += v;
        v *= zeta;
    }
    for (double& x : w.c) x /= total;
    return w;
}

} // namespace grlp
