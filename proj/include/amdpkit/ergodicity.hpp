#pragma once

#include "amdpkit/mdp.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace amdp {

/// Default lag cap when no mixing time is known.
inline constexpr int kDefaultLagCap = 4096;

struct MinorizationTime {
    double t_minorize = 0.0;
    int best_m = 0;
    double q = 0.0;
};

struct PolicyErgodicity {
    Policy policy;
    int t_mix = 0;
    MinorizationTime minorization;
};

/// Mixing and minorization times of a chain or, for an MDP, their maxima
/// over all deterministic policies.
struct ErgodicityReport {
    int t_mix = 0;
    double t_minorize = 0.0;
    int best_m = 0;
    double q_at_best_m = 0.0;
    std::vector<PolicyErgodicity> per_policy;

    /// t_minorize <= 22 t_mix <= 22 log(16) t_minorize
    [[nodiscard]] bool sandwich_holds() const;
};

/// q_m = sum_{s'} min_s P^m(s, s'): the mass of the best Doeblin minorizing
/// measure at lag m. The column-minimum measure is optimal for fixed m since
/// any q psi below every row is below their pointwise minimum.
double minorization_coefficient(const InducedChain& chain, int m);

/// min over 1 <= m <= m_max of m / q_m. Stops early once m exceeds the best
/// ratio found, since m / q_m >= m. Throws NotErgodicError if every q_m is 0.
MinorizationTime minorization_time(const InducedChain& chain, int m_max = kDefaultLagCap);

/// Smallest m with max_s ||P^m(s,.) - eta||_1 <= 1/2, where ||.||_1 is the
/// sum of absolute differences. Throws NotErgodicError when not reached by
/// m_max or when the chain has several recurrent classes.
int mixing_time(const InducedChain& chain, int m_max = kDefaultLagCap);

/// Report for a single chain; the lag cap for the minorization scan is
/// 16 t_mix.
ErgodicityReport chain_ergodicity(const InducedChain& chain, int m_max = kDefaultLagCap);

/// Maximizes t_mix and t_minorize over every deterministic policy. Throws
/// EnumerationInfeasibleError beyond `cap` policies and NotErgodicError naming
/// the first policy whose chain is not uniformly ergodic.
ErgodicityReport mdp_ergodicity(const TabularMdp& mdp, int m_max = kDefaultLagCap,
                                std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace amdp
