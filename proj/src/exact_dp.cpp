#include "amdpkit/exact_dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace amdp {

namespace {

void require_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw std::invalid_argument("discount factor must lie in (0,1)");
    }
}

const Matrix& pick_rewards(const TabularMdp& mdp, const std::optional<Matrix>& override) {
    if (!override) return mdp.rewards();
    if (override->rows() != mdp.n_states() || override->cols() != mdp.n_actions()) {
        throw InvalidMdpError("reward override has the wrong shape");
    }
    return *override;
}

// One Bellman backup; writes max_a Q into `out` and returns the greedy policy.
Policy backup(const TabularMdp& mdp, const Matrix& rewards, double gamma, const ValueVector& v,
              ValueVector& out) {
    const int n = mdp.n_states();
    const int m = mdp.n_actions();
    const Vector pv = mdp.kernel() * v;
    std::vector<int> actions(n, 0);
    for (int s = 0; s < n; ++s) {
        double best = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < m; ++a) {
            const double q = rewards(s, a) + gamma * pv(mdp.row_index(s, a));
            if (q > best) {
                best = q;
                actions[s] = a;
            }
        }
        out(s) = best;
    }
    return Policy(std::move(actions));
}

}  // namespace

ValueVector evaluate_discounted(const InducedChain& chain, double gamma) {
    require_gamma(gamma);
    const int n = chain.n_states();
    const Matrix system = Matrix::Identity(n, n) - gamma * chain.transition;
    Eigen::PartialPivLU<Matrix> lu(system);
    ValueVector v = lu.solve(chain.reward);
    if (!v.allFinite()) {
        throw InvalidMdpError("policy evaluation system is singular; kernel is malformed");
    }
    return v;
}

ValueVector evaluate_discounted(const TabularMdp& mdp, const Policy& policy, double gamma) {
    return evaluate_discounted(induce(mdp, policy), gamma);
}

Matrix q_values(const TabularMdp& mdp, const Matrix& rewards, double gamma, const ValueVector& v) {
    const Vector pv = mdp.kernel() * v;
    Matrix q(mdp.n_states(), mdp.n_actions());
    for (int s = 0; s < mdp.n_states(); ++s) {
        for (int a = 0; a < mdp.n_actions(); ++a) {
            q(s, a) = rewards(s, a) + gamma * pv(mdp.row_index(s, a));
        }
    }
    return q;
}

Policy greedy_policy(const TabularMdp& mdp, const std::optional<Matrix>& rewards_override,
                     double gamma, const ValueVector& v) {
    ValueVector scratch(mdp.n_states());
    return backup(mdp, pick_rewards(mdp, rewards_override), gamma, v, scratch);
}

double bellman_residual(const TabularMdp& mdp, const Matrix& rewards, double gamma,
                        const ValueVector& v) {
    ValueVector next(mdp.n_states());
    backup(mdp, rewards, gamma, v, next);
    return (next - v).cwiseAbs().maxCoeff();
}

int value_iteration_cap(double gamma, double tol) {
    const double sweeps = std::ceil(std::log(2.0 / ((1.0 - gamma) * tol)) / (1.0 - gamma));
    return static_cast<int>(std::min(sweeps, 1e9)) + 1000;
}

DiscountedSolution solve_bellman(const TabularMdp& mdp, const std::optional<Matrix>& rewards_override,
                                 double gamma, double tol) {
    require_gamma(gamma);
    if (!(tol > 0.0)) throw std::invalid_argument("solve tolerance must be positive");
    const Matrix& rewards = pick_rewards(mdp, rewards_override);

    const int cap = value_iteration_cap(gamma, tol);
    const double target = tol * (1.0 - gamma) / (2.0 * gamma);

    ValueVector v = ValueVector::Zero(mdp.n_states());
    ValueVector next(mdp.n_states());
    Policy policy;
    double residual = std::numeric_limits<double>::infinity();
    int iterations = 0;
    while (true) {
        policy = backup(mdp, rewards, gamma, v, next);
        residual = (next - v).cwiseAbs().maxCoeff();
        v.swap(next);
        ++iterations;
        const double floor = 8.0 * std::numeric_limits<double>::epsilon() *
                             (1.0 + v.cwiseAbs().maxCoeff());
        if (residual <= std::max(target, floor)) break;
        if (iterations >= cap) {
            std::ostringstream msg;
            msg << "value iteration hit the cap of " << cap << " sweeps with residual " << residual;
            throw IterationLimitError(msg.str(), residual);
        }
    }

    // Polish: exact evaluation of the greedy policy, repeated while the greedy
    // policy keeps changing (policy iteration from a near-optimal start).
    const int max_polish = 2 * mdp.n_states() * mdp.n_actions() + 16;
    for (int round = 0; round < max_polish; ++round) {
        v = evaluate_discounted(induce(mdp, rewards, policy), gamma);
        ++iterations;
        Policy improved = backup(mdp, rewards, gamma, v, next);
        // Only switch on a strict improvement beyond rounding, so that exact
        // ties keep the lowest index already chosen.
        bool changed = false;
        std::vector<int> actions = policy.actions();
        const double slack = 64.0 * std::numeric_limits<double>::epsilon() *
                             (1.0 + v.cwiseAbs().maxCoeff());
        for (int s = 0; s < mdp.n_states(); ++s) {
            if (improved[s] != actions[s] && next(s) > v(s) + slack) {
                actions[s] = improved[s];
                changed = true;
            }
        }
        if (!changed) break;
        policy = Policy(std::move(actions));
    }

    residual = bellman_residual(mdp, rewards, gamma, v);
    Policy greedy = greedy_policy(mdp, rewards, gamma, v);
    return DiscountedSolution{std::move(v), std::move(greedy), iterations, residual};
}

Matrix sigma(const TabularMdp& mdp, const ValueVector& v) {
    const Vector mean = mdp.kernel() * v;
    const Vector second = mdp.kernel() * v.cwiseProduct(v);
    Matrix out(mdp.n_states(), mdp.n_actions());
    for (int s = 0; s < mdp.n_states(); ++s) {
        for (int a = 0; a < mdp.n_actions(); ++a) {
            const auto i = mdp.row_index(s, a);
            out(s, a) = std::sqrt(std::max(0.0, second(i) - mean(i) * mean(i)));
        }
    }
    return out;
}

int default_aux_levels(double gamma) {
    require_gamma(gamma);
    return static_cast<int>(std::floor(0.5 * std::log2(1.0 / (1.0 - gamma))));
}

std::vector<AuxLevel> aux_value_sequence(const TabularMdp& mdp, const Policy& policy,
                                         const Matrix& rewards, double gamma, int levels) {
    if (levels < 0 || levels > 64) {
        throw std::invalid_argument("auxiliary levels must lie in [0, 64]");
    }
    InducedChain chain = induce(mdp, rewards, policy);
    std::vector<AuxLevel> out;
    out.reserve(static_cast<std::size_t>(levels) + 1);
    ValueVector h = chain.reward;
    for (int l = 0; l <= levels; ++l) {
        chain.reward = h;
        ValueVector v = evaluate_discounted(chain, gamma);
        const Matrix sd = sigma(mdp, v);
        ValueVector next_h(mdp.n_states());
        for (int s = 0; s < mdp.n_states(); ++s) next_h(s) = sd(s, policy[s]);
        out.push_back({std::move(h), std::move(v)});
        h = std::move(next_h);
    }
    return out;
}

}  // namespace amdp
