#include "amdpkit/average_reward.hpp"
#include "amdpkit/ergodicity.hpp"
#include "amdpkit/exact_dp.hpp"
#include "amdpkit/instances.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace amdp;

namespace {

double poisson_residual(const InducedChain& chain, const GainBias& gb) {
    const int n = chain.n_states();
    const Vector lhs = chain.reward - gb.gain * Vector::Ones(n);
    const Vector rhs = (Matrix::Identity(n, n) - chain.transition) * gb.bias;
    return (lhs - rhs).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_SUITE("average_reward") {

TEST_CASE("stationary distribution closed forms") {
    for (double theta : {0.01, 0.3, 0.5, 0.99}) {
        const auto eta = stationary(make_chain(oracle::symmetric_chain(theta)));
        CHECK(eta(0) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(eta(1) == doctest::Approx(0.5).epsilon(1e-12));
    }
    Matrix iid(3, 3);
    iid << 0.2, 0.5, 0.3, 0.2, 0.5, 0.3, 0.2, 0.5, 0.3;
    const auto eta = stationary(make_chain(iid));
    CHECK((eta.transpose() - iid.row(0)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("stationary distribution matches power iteration") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto chain = induce(random_ergodic_mdp(3, 1, seed, 0.02), Policy({0, 0, 0}));
        const auto eta = oracle::to_vec(stationary(chain));
        const auto ref = oracle::power_iteration(oracle::to_dense(chain.transition), 2000);
        CHECK(oracle::sup_diff(eta, ref) <= 1e-8);
    }
}

TEST_CASE("stationary rejects several recurrent classes") {
    CHECK_THROWS_AS(stationary(make_chain(Matrix::Identity(2, 2))), NotErgodicError);
    Matrix split(3, 3);
    split << 1, 0, 0, 0.5, 0, 0.5, 0, 0, 1;
    CHECK(recurrent_class_count(make_chain(split)) == 2);
    CHECK_THROWS_AS(average_reward(make_chain(split, Vector::Ones(3))), NotErgodicError);
    CHECK(recurrent_class_count(make_chain(oracle::symmetric_chain(0.2))) == 1);
}

TEST_CASE("periodic chains still have a unique stationary law") {
    const auto eta = stationary(make_chain(oracle::symmetric_chain(1.0)));
    CHECK(eta(0) == doctest::Approx(0.5));
}

TEST_CASE("average reward") {
    CHECK(average_reward(make_chain(oracle::symmetric_chain(0.2), Vector::Constant(2, 0.37))) ==
          doctest::Approx(0.37).epsilon(1e-14));
    Vector r(2);
    r << 0.0, 1.0;
    CHECK(average_reward(make_chain(oracle::symmetric_chain(0.1), r)) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("suboptimal action of the hard instance: closed form and simulation") {
    const auto mdp = hard_instance({0.1, 0.2, 2});
    const auto chain = induce(mdp, Policy({0, 1}));
    CHECK(std::abs(average_reward(chain) - 1.0 / 2.2) <= 1e-12);
    auto [p, rr] = oracle::chain_of(mdp, {0, 1});
    CHECK(std::abs(oracle::simulate_average(p, rr, 0, 1'000'000, 42) - 1.0 / 2.2) <= 5e-3);
}

TEST_CASE("poisson equation") {
    const auto constant = poisson_solve(make_chain(oracle::symmetric_chain(0.3), Vector::Constant(2, 0.6)));
    CHECK(constant.gain == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(constant.bias.cwiseAbs().maxCoeff() <= 1e-14);

    Vector r(2);
    r << 0.0, 1.0;
    const auto chain = make_chain(oracle::symmetric_chain(0.1), r);
    const auto gb = poisson_solve(chain);
    CHECK(gb.gain == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(gb.bias(0) == doctest::Approx(-2.5).epsilon(1e-12));
    CHECK(gb.bias(1) == doctest::Approx(2.5).epsilon(1e-12));

    GainBias shifted = gb;
    shifted.bias.array() += 7.0;
    CHECK(poisson_residual(chain, shifted) <= 1e-10);
}

TEST_CASE("poisson residual and normalization on random chains") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto mdp = random_ergodic_mdp(2 + seed % 4, 2, seed, 0.01);
        std::vector<int> pi(mdp.n_states());
        for (int s = 0; s < mdp.n_states(); ++s) pi[s] = (seed >> s) & 1;
        const auto chain = induce(mdp, Policy(pi));
        const auto gb = poisson_solve(chain);
        CHECK(poisson_residual(chain, gb) <= 1e-10);
        CHECK(gb.residual <= 1e-10);
        CHECK(std::abs(stationary(chain).dot(gb.bias)) <= 1e-10);
        CHECK(gb.gain == doctest::Approx(average_reward(chain)).epsilon(1e-13));
    }
}

TEST_CASE("gain does not depend on the start state") {
    const auto mdp = random_ergodic_mdp(3, 2, 8, 0.05);
    auto [p, r] = oracle::chain_of(mdp, {1, 0, 1});
    const double gain = average_reward(induce(mdp, Policy({1, 0, 1})));
    for (int s = 0; s < 3; ++s) {
        CHECK(std::abs(oracle::simulate_average(p, r, s, 1'000'000, 100 + s) - gain) <= 5e-3);
    }
}

TEST_CASE("optimal average reward") {
    const auto hard = hard_instance({0.1, 0.2, 2});
    const auto best = optimal_average_reward(hard);
    CHECK(std::abs(best.gain - 0.5) <= 1e-12);
    CHECK(best.policy[1] == 0);
    CHECK(best.policy == Policy({0, 0}));

    // All policies tie on an action-independent MDP.
    const auto flat = TabularMdp::from_tables({{0.3, 0.3}, {0.9, 0.9}},
                                              {{{0.4, 0.6}, {0.4, 0.6}}, {{0.5, 0.5}, {0.5, 0.5}}});
    CHECK(optimal_average_reward(flat).policy == Policy({0, 0}));

    const auto mdp = random_ergodic_mdp(3, 2, 21, 0.05);
    const auto opt = optimal_average_reward(mdp);
    double brute = -1.0;
    for (const auto& pi : oracle::all_policies(3, 2)) {
        auto [p, r] = oracle::chain_of(mdp, pi);
        const auto eta = oracle::power_iteration(p, 5000);
        double g = 0.0;
        for (int s = 0; s < 3; ++s) g += eta[s] * r[s];
        brute = std::max(brute, g);
    }
    CHECK(opt.gain == doctest::Approx(brute).epsilon(1e-10));
    auto [p, r] = oracle::chain_of(mdp, opt.policy.actions());
    CHECK(std::abs(oracle::simulate_average(p, r, 0, 1'000'000, 5) - opt.gain) <= 3e-3);

    CHECK_THROWS_AS(optimal_average_reward(mdp, 4), EnumerationInfeasibleError);
}

TEST_CASE("hard instance gap is exact for several parameters") {
    for (double theta : {0.01, 0.05, 0.2, 0.4})
        for (double kappa : {0.0, 0.1, 0.2, 1.0}) {
            if (theta * (1 + kappa) > 1.0) continue;
            const auto mdp = hard_instance({theta, kappa, 2});
            CHECK(std::abs(optimal_average_reward(mdp).gain - 0.5) <= 1e-12);
            const double sub = average_reward(induce(mdp, Policy({0, 1})));
            CHECK(std::abs((0.5 - sub) - kappa / (2.0 * (2.0 + kappa))) <= 1e-12);
        }
}

TEST_CASE("discounted values approach the gain") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto mdp = random_ergodic_mdp(3, 2, 500 + seed, 0.05);
        const double t = mdp_ergodicity(mdp).t_minorize;
        for (const auto& pi : oracle::all_policies(3, 2)) {
            const auto chain = induce(mdp, Policy(pi));
            const double gain = average_reward(chain);
            for (double gamma : {0.9, 0.99, 0.999}) {
                const Vector v = evaluate_discounted(chain, gamma);
                const double gap = ((1.0 - gamma) * v.array() - gain).abs().maxCoeff();
                CHECK(gap <= 9.0 * (1.0 - gamma) * t);
            }
        }
    }
}

}
