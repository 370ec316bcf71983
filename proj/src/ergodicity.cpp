#include "amdpkit/ergodicity.hpp"

#include "amdpkit/average_reward.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace amdp {

namespace {

double column_min_mass(const Matrix& power) {
    return power.colwise().minCoeff().sum();
}

// The L1 distance attains 1/2 exactly on some chains; allow rounding slack.
constexpr double kMixingSlack = 1e-12;

void check_sandwich(const ErgodicityReport& report) {
    if (!report.sandwich_holds()) {
        throw std::logic_error("mixing/minorization sandwich violated: t_minorize=" +
                               std::to_string(report.t_minorize) +
                               " t_mix=" + std::to_string(report.t_mix));
    }
}

}  // namespace

bool ErgodicityReport::sandwich_holds() const {
    const double mix = 22.0 * t_mix;
    return t_minorize <= mix && mix <= 22.0 * std::log(16.0) * t_minorize;
}

double minorization_coefficient(const InducedChain& chain, int m) {
    if (m < 1) throw std::invalid_argument("lag m must be at least 1");
    Matrix power = chain.transition;
    for (int k = 1; k < m; ++k) power = power * chain.transition;
    return column_min_mass(power);
}

MinorizationTime minorization_time(const InducedChain& chain, int m_max) {
    if (m_max < 1) throw std::invalid_argument("m_max must be at least 1");
    MinorizationTime best{std::numeric_limits<double>::infinity(), 0, 0.0};
    Matrix power = chain.transition;
    for (int m = 1; m <= m_max; ++m) {
        if (m > 1) power = power * chain.transition;
        const double q = column_min_mass(power);
        if (q > 0.0) {
            const double ratio = m / q;
            if (ratio < best.t_minorize) best = {ratio, m, q};
        }
        if (m + 1 > best.t_minorize) break;
    }
    if (best.best_m == 0) {
        throw NotErgodicError("no Doeblin minorization found up to lag " + std::to_string(m_max));
    }
    return best;
}

int mixing_time(const InducedChain& chain, int m_max) {
    const Vector eta = stationary(chain);
    Matrix power = chain.transition;
    for (int m = 1; m <= m_max; ++m) {
        if (m > 1) power = power * chain.transition;
        const double distance =
            (power.rowwise() - eta.transpose()).cwiseAbs().rowwise().sum().maxCoeff();
        if (distance <= 0.5 + kMixingSlack) return m;
    }
    throw NotErgodicError("chain does not mix within " + std::to_string(m_max) + " steps");
}

ErgodicityReport chain_ergodicity(const InducedChain& chain, int m_max) {
    const int t_mix = mixing_time(chain, m_max);
    const auto minor = minorization_time(chain, 16 * t_mix);
    ErgodicityReport report{t_mix, minor.t_minorize, minor.best_m, minor.q, {}};
    check_sandwich(report);
    return report;
}

ErgodicityReport mdp_ergodicity(const TabularMdp& mdp, int m_max, std::uint64_t cap) {
    ErgodicityReport report;
    for_each_policy(
        mdp,
        [&](const Policy& policy) {
            PolicyErgodicity entry{policy, 0, {}};
            try {
                const auto chain = induce(mdp, policy);
                entry.t_mix = mixing_time(chain, m_max);
                entry.minorization = minorization_time(chain, 16 * entry.t_mix);
            } catch (const NotErgodicError& e) {
                throw NotErgodicError("policy " + to_string(policy) +
                                      " is not uniformly ergodic: " + e.what());
            }
            report.t_mix = std::max(report.t_mix, entry.t_mix);
            if (entry.minorization.t_minorize > report.t_minorize) {
                report.t_minorize = entry.minorization.t_minorize;
                report.best_m = entry.minorization.best_m;
                report.q_at_best_m = entry.minorization.q;
            }
            report.per_policy.push_back(std::move(entry));
        },
        cap);
    check_sandwich(report);
    return report;
}

}  // namespace amdp
