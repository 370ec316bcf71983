#pragma once

#include "amdpkit/mdp.hpp"

#include <cstdint>

namespace amdp {

/// Solution of the Poisson equation r_pi - gain = (I - P_pi) bias, with the
/// shift pinned by eta_pi[bias] = 0.
struct GainBias {
    double gain = 0.0;
    ValueVector bias;
    /// ||r_pi - gain 1 - (I - P_pi) bias||_inf
    double residual = 0.0;
};

/// Singular values of I - P below this count towards the null space.
inline constexpr double kRankTolerance = 1e-9;

/// Dimension of the null space of I - P (the number of recurrent classes).
int recurrent_class_count(const InducedChain& chain);

/// Stationary distribution eta with eta (I - P) = 0 and sum(eta) = 1.
/// Throws NotErgodicError if the chain has more than one recurrent class.
Vector stationary(const InducedChain& chain);

/// eta_pi[r_pi].
double average_reward(const InducedChain& chain);

GainBias poisson_solve(const InducedChain& chain);

struct OptimalGain {
    double gain = 0.0;
    Policy policy;
};

/// max over deterministic policies of the gain; ties go to the
/// lexicographically smallest policy.
OptimalGain optimal_average_reward(const TabularMdp& mdp,
                                   std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace amdp
