#pragma once

#include "amdpkit/mdp.hpp"

#include <cstdint>

namespace amdp {

/// Two-state family with tunable minorization time.
///
/// State 0 pays 0 and moves to state 1 with probability theta under every
/// action. State 1 pays 1 and, under action a, returns to state 0 with
/// probability theta (1 + kappa_a), where kappa_0 = 0 and kappa_a = kappa for
/// a >= 1. The gain of action a in state 1 is 1 / (2 + kappa_a), so the
/// optimal gain is 1/2. The optimal chain is the symmetric two-state chain,
/// whose minorization time is 1 / (2 theta).
struct HardInstanceSpec {
    double theta = 0.05;
    double kappa = 0.2;
    int n_actions = 2;
};

TabularMdp hard_instance(const HardInstanceSpec& spec);

/// Closed-form optimal gain of the family (1/2).
inline constexpr double kHardInstanceGain = 0.5;

/// Bisection on theta in (0, 1/2] until the optimal chain's minorization time
/// matches the target within `rel_tol`. Throws std::invalid_argument for
/// targets below 1 or when the bracket does not contain the target.
double calibrate_theta(double t_minorize_target, double rel_tol = 1e-6);

/// Random MDP whose kernel rows are min_prob + (1 - n min_prob) D with D a
/// flat-Dirichlet draw; rewards are uniform on [0,1]. Every row puts at least
/// min_prob on each state, so every policy is Doeblin at lag one with
/// q_1 >= n min_prob.
TabularMdp random_ergodic_mdp(int n_states, int n_actions, std::uint64_t seed, double min_prob);

}  // namespace amdp
