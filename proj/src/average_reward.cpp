#include "amdpkit/average_reward.hpp"

#include <cmath>
#include <limits>

namespace amdp {

namespace {

Matrix generator(const InducedChain& chain) {
    const int n = chain.n_states();
    return Matrix::Identity(n, n) - chain.transition;
}

}  // namespace

int recurrent_class_count(const InducedChain& chain) {
    Eigen::JacobiSVD<Matrix> svd(generator(chain));
    const auto& values = svd.singularValues();
    int nullity = 0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values(i) <= kRankTolerance) ++nullity;
    }
    return nullity;
}

Vector stationary(const InducedChain& chain) {
    const int n = chain.n_states();
    const int classes = recurrent_class_count(chain);
    if (classes != 1) {
        throw NotErgodicError("chain has " + std::to_string(classes) +
                              " recurrent classes; expected exactly one");
    }
    // Solve (I - P)^T eta = 0 with the last equation replaced by sum(eta) = 1.
    Matrix system = generator(chain).transpose();
    system.row(n - 1).setOnes();
    Vector rhs = Vector::Zero(n);
    rhs(n - 1) = 1.0;
    Vector eta = Eigen::PartialPivLU<Matrix>(system).solve(rhs);
    // Clip rounding noise on transient states.
    eta = eta.cwiseMax(0.0);
    eta /= eta.sum();

    const double residual = (eta.transpose() * chain.transition - eta.transpose()).cwiseAbs().maxCoeff();
    if (!eta.allFinite() || residual > 1e-10) {
        throw NotErgodicError("stationary distribution residual " + std::to_string(residual) +
                              " exceeds 1e-10");
    }
    return eta;
}

double average_reward(const InducedChain& chain) { return stationary(chain).dot(chain.reward); }

GainBias poisson_solve(const InducedChain& chain) {
    const int n = chain.n_states();
    const Vector eta = stationary(chain);
    const double gain = eta.dot(chain.reward);

    // Fundamental matrix route: (I - P + 1 eta) u = r - gain 1 has the unique
    // solution with eta[u] = 0 whenever there is a single recurrent class.
    const Matrix system = generator(chain) + Vector::Ones(n) * eta.transpose();
    const Vector centered = chain.reward - gain * Vector::Ones(n);
    Vector bias = Eigen::PartialPivLU<Matrix>(system).solve(centered);

    const double residual = (centered - generator(chain) * bias).cwiseAbs().maxCoeff();
    return GainBias{gain, std::move(bias), residual};
}

OptimalGain optimal_average_reward(const TabularMdp& mdp, std::uint64_t cap) {
    OptimalGain best{-std::numeric_limits<double>::infinity(), Policy{}};
    for_each_policy(
        mdp,
        [&](const Policy& policy) {
            const double gain = average_reward(induce(mdp, policy));
            // Enumeration is lexicographic, so strict improvement keeps the
            // smallest policy among ties.
            if (gain > best.gain + 1e-14) best = {gain, policy};
        },
        cap);
    return best;
}

}  // namespace amdp
