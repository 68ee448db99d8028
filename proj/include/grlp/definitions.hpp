// Core scalar/vector/matrix types and small numerical helpers shared by the
// whole library.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace grlp {

using numvec = std::vector<double>;
using indvec = std::vector<int>;

/// Dense row-major matrix. Kept deliberately small: the library only needs
/// storage, element access and a few product loops written at call sites.
struct Matrix {
    int rows = 0;
    int cols = 0;
    numvec data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

    double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const {
        return data[static_cast<size_t>(r) * cols + c];
    }
    const double* row(int r) const { return data.data() + static_cast<size_t>(r) * cols; }
    double* row(int r) { return data.data() + static_cast<size_t>(r) * cols; }
};

inline double inf_norm(const numvec& v) {
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}

inline double inf_dist(const numvec& a, const numvec& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline bool all_finite(const numvec& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

inline void check(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

/// Deterministic random source. mt19937_64 is bit-exact across platforms; the
/// double mappings are done by hand because the standard distributions are not.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return (engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0, 1).
    double uniform_open() { return ((engine_() >> 11) + 0.5) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    int below(int n) { return static_cast<int>(engine_() % static_cast<uint64_t>(n)); }

    uint64_t raw() { return engine_(); }

    /// One index drawn from an unnormalized nonnegative weight vector.
    int draw_weighted(const numvec& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0))
            throw std::invalid_argument("draw_weighted: weights are degenerate");
        double u = uniform() * total;
        double acc = 0.0;
        for (size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size()) - 1;
    }

private:
    std::mt19937_64 engine_;
};

namespace detail {

/// Solves A x = b by Gaussian elimination with partial pivoting. A and b are
/// taken by value and consumed. Throws on (numerical) singularity.
inline numvec solve_dense(Matrix a, numvec b) {
    const int n = a.rows;
    if (a.cols != n || static_cast<int>(b.size()) != n)
        throw std::invalid_argument("solve_dense: dimension mismatch");
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(a(col, col));
        for (int r = col + 1; r < n; ++r) {
            double v = std::abs(a(r, col));
            if (v > best) { best = v; piv = r; }
        }
        if (best < 1e-300)
            throw std::runtime_error("solve_dense: singular matrix");
        if (piv != col) {
            for (int c = col; c < n; ++c) std::swap(a(piv, c), a(col, c));
            std::swap(b[piv], b[col]);
        }
        const double d = a(col, col);
        for (int r = col + 1; r < n; ++r) {
            const double f = a(r, col) / d;
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) a(r, c) -= f * a(col, c);
            b[r] -= f * b[col];
        }
    }
    numvec x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= a(r, c) * x[c];
        x[r] = s / a(r, r);
    }
    return x;
}

/// Numerical column rank via modified Gram-Schmidt with a relative threshold.
inline int column_rank(const Matrix& a, double rel_tol = 1e-10) {
    const int n = a.rows, k = a.cols;
    std::vector<numvec> basis;
    double scale = 0.0;
    for (double v : a.data) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return 0;
    for (int j = 0; j < k; ++j) {
        numvec v(n);
        for (int i = 0; i < n; ++i) v[i] = a(i, j);
        for (const numvec& q : basis) {
            double dot = 0.0;
            for (int i = 0; i < n; ++i) dot += q[i] * v[i];
            for (int i = 0; i < n; ++i) v[i] -= dot * q[i];
        }
        double nrm = 0.0;
        for (double x : v) nrm += x * x;
        nrm = std::sqrt(nrm);
        if (nrm > rel_tol * scale * std::sqrt(static_cast<double>(n))) {
            for (double& x : v) x /= nrm;
            basis.push_back(std::move(v));
        }
    }
    return static_cast<int>(basis.size());
}

} // namespace detail
} // namespace grlp
