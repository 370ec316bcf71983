#pragma once

// Reference computations used to check the library. They deliberately avoid
// the library's own solvers: plain std::vector arithmetic, Gauss elimination,
// truncated series, power iteration and simulation with a different RNG.

#include "amdpkit/mdp.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;
using Vec = std::vector<double>;

inline Dense to_dense(const amdp::Matrix& m) {
    Dense out(m.rows(), Vec(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    return out;
}

inline Vec to_vec(const amdp::Vector& v) { return Vec(v.data(), v.data() + v.size()); }

// Gauss elimination with partial pivoting.
inline Vec gauss_solve(Dense a, Vec b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-300) throw std::runtime_error("oracle: singular system");
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    Vec x(n);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t c = i + 1; c < n; ++c) acc -= a[i][c] * x[c];
        x[i] = acc / a[i][i];
    }
    return x;
}

inline Vec mat_vec(const Dense& p, const Vec& v) {
    Vec out(p.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) out[i] += p[i][j] * v[j];
    return out;
}

inline Dense mat_mul(const Dense& a, const Dense& b) {
    Dense out(a.size(), Vec(b[0].size(), 0.0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k)
            for (std::size_t j = 0; j < b[0].size(); ++j) out[i][j] += a[i][k] * b[k][j];
    return out;
}

// P_pi and r_pi read straight from the kernel layout.
inline std::pair<Dense, Vec> chain_of(const amdp::TabularMdp& mdp, const std::vector<int>& pi) {
    const int n = mdp.n_states();
    Dense p(n, Vec(n));
    Vec r(n);
    for (int s = 0; s < n; ++s) {
        r[s] = mdp.reward(s, pi[s]);
        for (int t = 0; t < n; ++t) p[s][t] = mdp.transition(s, pi[s], t);
    }
    return {p, r};
}

// (I - gamma P) v = r by elimination.
inline Vec discounted_value(const Dense& p, const Vec& r, double gamma) {
    const std::size_t n = r.size();
    Dense a(n, Vec(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i][j] = (i == j ? 1.0 : 0.0) - gamma * p[i][j];
    return gauss_solve(a, r);
}

// sum_{t<T} gamma^t P^t r
inline Vec truncated_series(const Dense& p, const Vec& r, double gamma, int terms) {
    Vec acc(r.size(), 0.0);
    Vec term = r;
    double g = 1.0;
    for (int t = 0; t < terms; ++t) {
        for (std::size_t i = 0; i < r.size(); ++i) acc[i] += g * term[i];
        term = mat_vec(p, term);
        g *= gamma;
    }
    return acc;
}

inline std::vector<std::vector<int>> all_policies(int n_states, int n_actions) {
    std::vector<std::vector<int>> out;
    std::vector<int> pi(n_states, 0);
    while (true) {
        out.push_back(pi);
        int s = n_states - 1;
        while (s >= 0 && ++pi[s] == n_actions) pi[s--] = 0;
        if (s < 0) break;
    }
    return out;
}

struct Enumerated {
    Vec value;
    std::vector<int> policy;
};

// Pointwise-optimal value over every deterministic policy, and the first
// policy (lexicographic) attaining it up to `tie`.
inline Enumerated enumerate_optimal(const amdp::TabularMdp& mdp, double gamma, double tie = 1e-9) {
    const auto policies = all_policies(mdp.n_states(), mdp.n_actions());
    std::vector<Vec> values;
    Vec best(mdp.n_states(), -1e300);
    for (const auto& pi : policies) {
        auto [p, r] = chain_of(mdp, pi);
        values.push_back(discounted_value(p, r, gamma));
        for (int s = 0; s < mdp.n_states(); ++s) best[s] = std::max(best[s], values.back()[s]);
    }
    for (std::size_t k = 0; k < policies.size(); ++k) {
        bool optimal = true;
        for (int s = 0; s < mdp.n_states(); ++s) optimal = optimal && values[k][s] >= best[s] - tie;
        if (optimal) return {best, policies[k]};
    }
    throw std::runtime_error("oracle: no policy attains the pointwise maximum");
}

// Row of P^steps from a uniform start, i.e. the stationary law for an ergodic chain.
inline Vec power_iteration(const Dense& p, int steps) {
    const std::size_t n = p.size();
    Vec mu(n, 1.0 / static_cast<double>(n));
    for (int k = 0; k < steps; ++k) {
        Vec next(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) next[j] += mu[i] * p[i][j];
        mu = next;
    }
    return mu;
}

// Long-run reward average of a simulated trajectory.
inline double simulate_average(const Dense& p, const Vec& r, int start, std::int64_t steps,
                               std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int s = start;
    double total = 0.0;
    for (std::int64_t t = 0; t < steps; ++t) {
        total += r[s];
        const double u = unif(rng);
        double acc = 0.0;
        int next = static_cast<int>(p.size()) - 1;
        for (std::size_t j = 0; j < p.size(); ++j) {
            acc += p[s][j];
            if (u < acc) {
                next = static_cast<int>(j);
                break;
            }
        }
        s = next;
    }
    return total / static_cast<double>(steps);
}

// Upper quantile of chi-square with k degrees of freedom (Wilson-Hilferty).
inline double chi_square_quantile(int k, double z) {
    const double h = 2.0 / (9.0 * k);
    const double c = 1.0 - h + z * std::sqrt(h);
    return k * c * c * c;
}

inline double sup_diff(const Vec& a, const Vec& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

// Symmetric two-state chain flipping with probability theta.
inline amdp::Matrix symmetric_chain(double theta) {
    amdp::Matrix p(2, 2);
    p << 1.0 - theta, theta, theta, 1.0 - theta;
    return p;
}

}  // namespace oracle
