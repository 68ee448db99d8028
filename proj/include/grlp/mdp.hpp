// Finite discounted MDP model and the standard dynamic-programming operations:
// Bellman operator and targets, value iteration, greedy policies, policy
// evaluation and stationary distributions.

#pragma once

#include "grlp/definitions.hpp"

namespace grlp {

struct Transition {
    int to;
    double prob;
};

/// Finite discounted MDP. Kernels are stored as sparse rows so that large
/// structured chains (the controlled queue has three entries per row) stay
/// cheap; dense models can be loaded through from_dense.
struct MdpModel {
    int num_states = 0;
    int num_actions = 0;
    double alpha = 0.0;
    // kernel[a][s] lists the nonzero transitions of p_a(s, .)
    std::vector<std::vector<std::vector<Transition>>> kernel;
    // reward[a][s] = g_a(s)
    std::vector<numvec> reward;

    static MdpModel from_dense(const std::vector<Matrix>& p,
                               const std::vector<numvec>& g, double alpha) {
        MdpModel m;
        m.num_actions = static_cast<int>(p.size());
        check(m.num_actions > 0, "model: at least one action required");
        m.num_states = p[0].rows;
        m.alpha = alpha;
        m.kernel.resize(m.num_actions);
        m.reward.resize(m.num_actions);
        for (int a = 0; a < m.num_actions; ++a) {
            check(p[a].rows == m.num_states && p[a].cols == m.num_states,
                  "model: transition matrix shape mismatch");
            m.kernel[a].resize(m.num_states);
            for (int s = 0; s < m.num_states; ++s)
                for (int t = 0; t < m.num_states; ++t)
                    if (p[a](s, t) != 0.0)
                        m.kernel[a][s].push_back({t, p[a](s, t)});
            m.reward[a] = g[a];
        }
        m.validate();
        return m;
    }

    void validate() const {
        check(num_states > 0, "model: positive state count required");
        check(num_actions > 0, "model: positive action count required");
        check(alpha > 0.0 && alpha < 1.0, "model: discount must lie strictly in (0,1)");
        check(static_cast<int>(kernel.size()) == num_actions &&
                  static_cast<int>(reward.size()) == num_actions,
              "model: per-action storage mismatch");
        for (int a = 0; a < num_actions; ++a) {
            check(static_cast<int>(kernel[a].size()) == num_states,
                  "model: kernel row count mismatch");
            check(static_cast<int>(reward[a].size()) == num_states,
                  "model: reward length mismatch");
            check(all_finite(reward[a]), "model: rewards must be finite");
            for (int s = 0; s < num_states; ++s) {
                double sum = 0.0;
                for (const Transition& t : kernel[a][s]) {
                    check(t.to >= 0 && t.to < num_states,
                          "model: transition target out of range");
                    check(t.prob >= 0.0 && t.prob <= 1.0,
                          "model: transition probability outside [0,1]");
                    sum += t.prob;
                }
                check(std::abs(sum - 1.0) <= 1e-12,
                      "model: transition row does not sum to 1");
            }
        }
    }
};

using ValueFunction = numvec; // length num_states
using Policy = indvec;        // length num_states, entries in [0, num_actions)

inline void check_compatible(const MdpModel& model, const ValueFunction& j) {
    check(static_cast<int>(j.size()) == model.num_states,
          "value function length does not match the model");
}

/// Expected next-state value (P_a J)(s).
inline double expected_value(const MdpModel& model, int a, int s, const numvec& j) {
    double acc = 0.0;
    for (const Transition& t : model.kernel[a][s]) acc += t.prob * j[t.to];
    return acc;
}

/// The un-maximized one-step lookahead array: targets[a][s] = g_a(s) + alpha (P_a J)(s).
inline std::vector<numvec> bellman_targets(const MdpModel& model, const ValueFunction& j) {
    check_compatible(model, j);
    std::vector<numvec> q(model.num_actions, numvec(model.num_states));
    for (int a = 0; a < model.num_actions; ++a)
        for (int s = 0; s < model.num_states; ++s)
            q[a][s] = model.reward[a][s] + model.alpha * expected_value(model, a, s, j);
    return q;
}

inline ValueFunction bellman_apply(const MdpModel& model, const ValueFunction& j) {
    check_compatible(model, j);
    numvec out(model.num_states, -std::numeric_limits<double>::infinity());
    for (int a = 0; a < model.num_actions; ++a)
        for (int s = 0; s < model.num_states; ++s) {
            double v = model.reward[a][s] + model.alpha * expected_value(model, a, s, j);
            if (v > out[s]) out[s] = v;
        }
    return out;
}

/// Fixed point of the Bellman operator to within ||J - J*||_inf <= tol.
/// Stops on the pre-update residual ||TJ - J||_inf <= tol (1-alpha) / (2 alpha)
/// and returns the post-update iterate, whose distance to the fixed point is
/// then at most tol/2 for every discount in (0,1).
inline ValueFunction value_iteration(const MdpModel& model, double tol,
                                     int max_iter = 1000000) {
    check(tol > 0.0, "value_iteration: tolerance must be positive");
    const double stop = tol * (1.0 - model.alpha) / (2.0 * model.alpha);
    numvec j(model.num_states, 0.0);
    double residual = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        numvec next = bellman_apply(model, j);
        residual = inf_dist(next, j);
        j = std::move(next);
        if (residual <= stop) return j;
    }
    throw std::runtime_error("value_iteration: iteration cap reached, residual " +
                             std::to_string(residual));
}

/// Greedy action selection; ties go to the lowest action index.
inline Policy greedy_policy(const MdpModel& model, const ValueFunction& j) {
    check_compatible(model, j);
    Policy u(model.num_states, 0);
    numvec best(model.num_states, -std::numeric_limits<double>::infinity());
    for (int a = 0; a < model.num_actions; ++a)
        for (int s = 0; s < model.num_states; ++s) {
            double v = model.reward[a][s] + model.alpha * expected_value(model, a, s, j);
            if (v > best[s]) {
                best[s] = v;
                u[s] = a;
            }
        }
    return u;
}

inline void check_policy(const MdpModel& model, const Policy& u) {
    check(static_cast<int>(u.size()) == model.num_states,
          "policy length does not match the model");
    for (int a : u)
        check(a >= 0 && a < model.num_actions, "policy contains an invalid action");
}

/// Value of a stationary deterministic policy: the unique solution of
/// (I - alpha P_u) J = g_u. Direct dense solve up to 2000 states, fixed-point
/// iteration beyond that (residual held to 1e-8).
inline ValueFunction policy_evaluate(const MdpModel& model, const Policy& u) {
    check_policy(model, u);
    const int n = model.num_states;
    const double acceptable = 1e-8;
    numvec j(n, 0.0);
    if (n <= 2000) {
        Matrix a(n, n);
        numvec b(n);
        for (int s = 0; s < n; ++s) {
            a(s, s) = 1.0;
            for (const Transition& t : model.kernel[u[s]][s])
                a(s, t.to) -= model.alpha * t.prob;
            b[s] = model.reward[u[s]][s];
        }
        j = detail::solve_dense(std::move(a), std::move(b));
    } else {
        for (int it = 0; it < 2000000; ++it) {
            numvec next(n);
            double residual = 0.0;
            for (int s = 0; s < n; ++s) {
                next[s] = model.reward[u[s]][s];
                for (const Transition& t : model.kernel[u[s]][s])
                    next[s] += model.alpha * t.prob * j[t.to];
                residual = std::max(residual, std::abs(next[s] - j[s]));
            }
            j = std::move(next);
            if (residual * model.alpha / (1.0 - model.alpha) <= acceptable) break;
        }
    }
    // report if the advertised residual is not met
    double residual = 0.0;
    for (int s = 0; s < n; ++s) {
        double v = model.reward[u[s]][s] + model.alpha * expected_value(model, u[s], s, j);
        residual = std::max(residual, std::abs(v - j[s]));
    }
    if (residual > acceptable)
        throw std::runtime_error("policy_evaluate: residual " + std::to_string(residual) +
                                 " exceeds 1e-8");
    return j;
}

/// Stationary distribution of the chain P_u by damped power iteration on the
/// lazy chain 0.99 P_u + 0.01 I, which shares the stationary distribution of
/// P_u and is aperiodic. Convergence is tested on the undamped L1 residual
/// ||pi P_u - pi||_1.
inline numvec stationary_distribution(const MdpModel& model, const Policy& u,
                                      double tol, int max_iter = 1000000) {
    check_policy(model, u);
    check(tol > 0.0, "stationary_distribution: tolerance must be positive");
    const int n = model.num_states;
    numvec pi(n, 1.0 / n);
    for (int it = 0; it < max_iter; ++it) {
        numvec step(n, 0.0);
        for (int s = 0; s < n; ++s)
            for (const Transition& t : model.kernel[u[s]][s])
                step[t.to] += pi[s] * t.prob;
        double residual = 0.0;
        for (int s = 0; s < n; ++s) residual += std::abs(step[s] - pi[s]);
        if (residual <= tol) {
            double total = 0.0;
            for (double& x : pi) { x = std::max(x, 0.0); total += x; }
            for (double& x : pi) x /= total;
            return pi;
        }
        for (int s = 0; s < n; ++s) pi[s] = 0.99 * step[s] + 0.01 * pi[s];
        double total = 0.0;
        for (double x : pi) total += x;
        for (double& x : pi) x /= total;
    }
    throw std::runtime_error("stationary_distribution: no convergence within cap");
}

} // namespace grlp
