#include "amdpkit/mdp.hpp"

#include <cmath>
#include <sstream>

namespace amdp {

std::string to_string(const Policy& policy) {
    std::ostringstream out;
    out << '(';
    for (std::size_t s = 0; s < policy.size(); ++s) {
        if (s > 0) out << ',';
        out << policy[s];
    }
    out << ')';
    return out.str();
}

TabularMdp::TabularMdp(Matrix rewards, Matrix kernel)
    : rewards_(std::move(rewards)), kernel_(std::move(kernel)) {
    if (rewards_.rows() < 1 || rewards_.cols() < 1) {
        throw InvalidMdpError("MDP needs at least one state and one action");
    }
    if (kernel_.rows() != rewards_.rows() * rewards_.cols() || kernel_.cols() != rewards_.rows()) {
        std::ostringstream msg;
        msg << "kernel shape " << kernel_.rows() << "x" << kernel_.cols() << " does not match "
            << rewards_.rows() << " states x " << rewards_.cols() << " actions";
        throw InvalidMdpError(msg.str());
    }
}

TabularMdp TabularMdp::from_tables(const std::vector<std::vector<double>>& rewards,
                                   const std::vector<std::vector<std::vector<double>>>& kernel) {
    const auto n_states = static_cast<Eigen::Index>(rewards.size());
    if (n_states == 0 || rewards.front().empty()) {
        throw InvalidMdpError("MDP needs at least one state and one action");
    }
    const auto n_actions = static_cast<Eigen::Index>(rewards.front().size());
    if (static_cast<Eigen::Index>(kernel.size()) != n_states) {
        throw InvalidMdpError("kernel must have one entry per state");
    }

    Matrix r(n_states, n_actions);
    Matrix p(n_states * n_actions, n_states);
    for (Eigen::Index s = 0; s < n_states; ++s) {
        if (static_cast<Eigen::Index>(rewards[s].size()) != n_actions ||
            static_cast<Eigen::Index>(kernel[s].size()) != n_actions) {
            throw InvalidMdpError("ragged table at state " + std::to_string(s));
        }
        for (Eigen::Index a = 0; a < n_actions; ++a) {
            r(s, a) = rewards[s][a];
            const auto& row = kernel[s][a];
            if (static_cast<Eigen::Index>(row.size()) != n_states) {
                throw InvalidMdpError("kernel row length mismatch at (s=" + std::to_string(s) +
                                      ",a=" + std::to_string(a) + ")");
            }
            for (Eigen::Index next = 0; next < n_states; ++next) {
                p(s * n_actions + a, next) = row[next];
            }
        }
    }
    return TabularMdp(std::move(r), std::move(p));
}

TabularMdp TabularMdp::with_rewards(Matrix rewards) const {
    return TabularMdp(std::move(rewards), kernel_);
}

namespace {
std::string at(int s, int a) {
    return "(s=" + std::to_string(s) + ",a=" + std::to_string(a) + ")";
}
}  // namespace

std::optional<std::string> validate(const TabularMdp& mdp, double reward_upper) {
    for (int s = 0; s < mdp.n_states(); ++s) {
        for (int a = 0; a < mdp.n_actions(); ++a) {
            const auto row = mdp.row(s, a);
            double sum = 0.0;
            for (int next = 0; next < mdp.n_states(); ++next) {
                const double p = row(next);
                if (!std::isfinite(p) || p < 0.0) {
                    return "negative or non-finite probability at " + at(s, a) +
                           " -> s'=" + std::to_string(next);
                }
                sum += p;
            }
            if (std::abs(sum - 1.0) > kRowSumTolerance) {
                return "row sum != 1 at " + at(s, a);
            }
            const double r = mdp.reward(s, a);
            if (!std::isfinite(r) || r < 0.0 || r > reward_upper) {
                std::ostringstream range;
                range << "reward out of [0," << reward_upper << "] at " << at(s, a);
                return range.str();
            }
        }
    }
    return std::nullopt;
}

void require_valid(const TabularMdp& mdp, double reward_upper) {
    if (auto violation = validate(mdp, reward_upper)) {
        throw InvalidMdpError(*violation);
    }
}

void require_valid(const TabularMdp& mdp, const Policy& policy) {
    if (static_cast<int>(policy.size()) != mdp.n_states()) {
        throw InvalidPolicyError("policy has " + std::to_string(policy.size()) +
                                 " entries for " + std::to_string(mdp.n_states()) + " states");
    }
    for (int s = 0; s < mdp.n_states(); ++s) {
        if (policy[s] < 0 || policy[s] >= mdp.n_actions()) {
            throw InvalidPolicyError("action " + std::to_string(policy[s]) +
                                     " out of range at state " + std::to_string(s));
        }
    }
}

InducedChain induce(const TabularMdp& mdp, const Policy& policy) {
    return induce(mdp, mdp.rewards(), policy);
}

InducedChain induce(const TabularMdp& mdp, const Matrix& rewards, const Policy& policy) {
    require_valid(mdp, policy);
    const int n = mdp.n_states();
    InducedChain chain{Matrix(n, n), Vector(n)};
    for (int s = 0; s < n; ++s) {
        chain.transition.row(s) = mdp.row(s, policy[s]);
        chain.reward(s) = rewards(s, policy[s]);
    }
    return chain;
}

InducedChain make_chain(Matrix transition, Vector reward) {
    if (transition.rows() != transition.cols()) {
        throw InvalidMdpError("transition matrix must be square");
    }
    if (reward.size() == 0) reward = Vector::Zero(transition.rows());
    if (reward.size() != transition.rows()) {
        throw InvalidMdpError("reward length does not match transition matrix");
    }
    return InducedChain{std::move(transition), std::move(reward)};
}

std::optional<std::uint64_t> policy_count(const TabularMdp& mdp) {
    std::uint64_t count = 1;
    const auto base = static_cast<std::uint64_t>(mdp.n_actions());
    for (int s = 0; s < mdp.n_states(); ++s) {
        if (count > UINT64_MAX / base) return std::nullopt;
        count *= base;
    }
    return count;
}

void for_each_policy(const TabularMdp& mdp, const std::function<void(const Policy&)>& visit,
                     std::uint64_t cap) {
    const auto count = policy_count(mdp);
    if (!count || *count > cap) {
        throw EnumerationInfeasibleError(
            "policy class |A|^|S| exceeds the enumeration cap of " + std::to_string(cap) +
            "; supply the quantity externally");
    }
    const int n = mdp.n_states();
    std::vector<int> actions(n, 0);
    for (std::uint64_t k = 0; k < *count; ++k) {
        visit(Policy(actions));
        // odometer increment with state n-1 as the least significant digit
        for (int s = n - 1; s >= 0; --s) {
            if (++actions[s] < mdp.n_actions()) break;
            actions[s] = 0;
        }
    }
}

double span_seminorm(const ValueVector& v) {
    if (v.size() == 0) return 0.0;
    return v.maxCoeff() - v.minCoeff();
}

bool all_finite(const ValueVector& v) { return v.allFinite(); }

}  // namespace amdp
