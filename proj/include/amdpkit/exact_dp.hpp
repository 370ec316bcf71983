#pragma once

#include "amdpkit/mdp.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace amdp {

/// Result of solving the discounted Bellman optimality equation.
struct DiscountedSolution {
    ValueVector value;
    Policy policy;
    /// Value-iteration sweeps plus policy-polish rounds.
    int iterations = 0;
    /// Sup-norm Bellman residual of `value` after polishing.
    double residual = 0.0;
};

inline constexpr double kDefaultSolveTolerance = 1e-10;

/// v^pi = (I - gamma P_pi)^{-1} r_pi by dense LU.
ValueVector evaluate_discounted(const InducedChain& chain, double gamma);
ValueVector evaluate_discounted(const TabularMdp& mdp, const Policy& policy, double gamma);

/// Q(s,a) = R(s,a) + gamma p_{s,a}[v] as an |S| x |A| table.
Matrix q_values(const TabularMdp& mdp, const Matrix& rewards, double gamma, const ValueVector& v);

/// argmax_a (R(s,a) + gamma p_{s,a}[v]), ties to the lowest action index.
Policy greedy_policy(const TabularMdp& mdp, const std::optional<Matrix>& rewards_override,
                     double gamma, const ValueVector& v);

/// sup_s |max_a (R(s,a) + gamma p_{s,a}[v]) - v(s)|.
double bellman_residual(const TabularMdp& mdp, const Matrix& rewards, double gamma,
                        const ValueVector& v);

/// Value-iteration iteration cap used by solve_bellman.
int value_iteration_cap(double gamma, double tol);

/// Solves v = max_a (R + gamma P v).
///
/// Runs value iteration until the Bellman residual drops below
/// tol * (1 - gamma) / (2 gamma), which bounds ||v - v*|| by tol. The
/// threshold is floored at a few ulps of ||v|| because for gamma close to one
/// it can sit below what double arithmetic resolves. The greedy policy is then
/// evaluated exactly by a linear solve and improved until stable.
///
/// Throws IterationLimitError when value iteration exceeds
/// value_iteration_cap(gamma, tol).
DiscountedSolution solve_bellman(const TabularMdp& mdp, const std::optional<Matrix>& rewards_override,
                                 double gamma, double tol = kDefaultSolveTolerance);

/// sigma(v)(s,a) = sqrt(max(0, p_{s,a}[v^2] - p_{s,a}[v]^2)).
Matrix sigma(const TabularMdp& mdp, const ValueVector& v);

/// floor(log2(1/(1-gamma)) / 2).
int default_aux_levels(double gamma);

struct AuxLevel {
    ValueVector h;
    ValueVector v;
};

/// h_0 = R_pi, v_l = (I - gamma P_pi)^{-1} h_l, h_{l+1} = sigma_pi(v_l), for
/// l = 0..levels. Returns levels + 1 pairs. levels must lie in [0, 64].
std::vector<AuxLevel> aux_value_sequence(const TabularMdp& mdp, const Policy& policy,
                                         const Matrix& rewards, double gamma, int levels);

}  // namespace amdp
