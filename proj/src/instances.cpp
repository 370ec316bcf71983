#include "amdpkit/instances.hpp"

#include "amdpkit/ergodicity.hpp"
#include "amdpkit/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace amdp {

TabularMdp hard_instance(const HardInstanceSpec& spec) {
    if (!(spec.theta > 0.0 && spec.theta <= 0.5)) {
        throw std::invalid_argument("theta must lie in (0, 1/2]");
    }
    if (!(spec.kappa >= 0.0)) throw std::invalid_argument("kappa must be non-negative");
    if (spec.n_actions < 2) throw std::invalid_argument("hard instance needs at least 2 actions");
    if (spec.theta * (1.0 + spec.kappa) > 1.0) {
        throw std::invalid_argument("theta * (1 + kappa) must not exceed 1");
    }

    const int m = spec.n_actions;
    Matrix rewards(2, m);
    Matrix kernel(2 * m, 2);
    for (int a = 0; a < m; ++a) {
        rewards(0, a) = 0.0;
        rewards(1, a) = 1.0;
        kernel.row(a) << 1.0 - spec.theta, spec.theta;
        const double leave = spec.theta * (1.0 + (a == 0 ? 0.0 : spec.kappa));
        kernel.row(m + a) << leave, 1.0 - leave;
    }
    return TabularMdp(std::move(rewards), std::move(kernel));
}

namespace {

double optimal_chain_minorization(double theta) {
    Matrix p(2, 2);
    p << 1.0 - theta, theta, theta, 1.0 - theta;
    return minorization_time(make_chain(std::move(p))).t_minorize;
}

}  // namespace

double calibrate_theta(double t_minorize_target, double rel_tol) {
    if (!(t_minorize_target >= 1.0)) {
        throw std::invalid_argument("minorization time target must be at least 1");
    }
    // t_minorize decreases in theta on (0, 1/2].
    double lo = 1e-9;
    double hi = 0.5;
    if (optimal_chain_minorization(hi) > t_minorize_target * (1.0 + rel_tol) ||
        optimal_chain_minorization(lo) < t_minorize_target) {
        throw std::invalid_argument("theta bracket does not contain the target");
    }
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double t = optimal_chain_minorization(mid);
        if (std::abs(t - t_minorize_target) <= rel_tol * t_minorize_target) return mid;
        if (t > t_minorize_target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double theta = 0.5 * (lo + hi);
    if (std::abs(optimal_chain_minorization(theta) - t_minorize_target) >
        rel_tol * t_minorize_target) {
        throw std::invalid_argument("theta bisection did not converge");
    }
    return theta;
}

TabularMdp random_ergodic_mdp(int n_states, int n_actions, std::uint64_t seed, double min_prob) {
    if (n_states < 1 || n_actions < 1) throw std::invalid_argument("sizes must be positive");
    if (!(min_prob > 0.0 && min_prob <= 1.0 / n_states)) {
        throw std::invalid_argument("min_prob must lie in (0, 1/n_states]");
    }
    SplitMix64 rng(hash_key({seed, 0x72616e64ULL}));

    Matrix rewards(n_states, n_actions);
    Matrix kernel(static_cast<Eigen::Index>(n_states) * n_actions, n_states);
    for (int s = 0; s < n_states; ++s) {
        for (int a = 0; a < n_actions; ++a) {
            rewards(s, a) = rng.uniform();
            // Flat Dirichlet via normalized exponentials, drawn by inverse CDF so
            // the output does not depend on the standard library's distributions.
            Vector row(n_states);
            for (int next = 0; next < n_states; ++next) row(next) = -std::log1p(-rng.uniform());
            row /= row.sum();
            // Mixing with the floor keeps every entry >= min_prob exactly;
            // min_prob = 1/n gives uniform rows.
            const double spare = std::max(0.0, 1.0 - n_states * min_prob);
            row = (spare * row).array() + min_prob;
            row /= row.sum();
            kernel.row(static_cast<Eigen::Index>(s) * n_actions + a) = row.transpose();
        }
    }
    return TabularMdp(std::move(rewards), std::move(kernel));
}

}  // namespace amdp
