#include "amdpkit/ergodicity.hpp"
#include "amdpkit/exact_dp.hpp"
#include "amdpkit/instances.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace amdp;

namespace {

TabularMdp action_independent(std::uint64_t seed) {
    const auto base = random_ergodic_mdp(3, 1, seed, 0.05);
    Matrix kernel(6, 3);
    Matrix rewards(3, 2);
    for (int s = 0; s < 3; ++s) {
        for (int a = 0; a < 2; ++a) {
            kernel.row(s * 2 + a) = base.row(s, 0);
            rewards(s, a) = base.reward(s, 0);
        }
    }
    return TabularMdp(rewards, kernel);
}

}  // namespace

TEST_SUITE("exact_dp") {

TEST_CASE("evaluate: geometric series and zero reward") {
    const auto chain = make_chain(Matrix::Ones(1, 1), Vector::Ones(1));
    CHECK(evaluate_discounted(chain, 0.9)(0) == doctest::Approx(10.0).epsilon(1e-14));
    const auto zero = make_chain(oracle::symmetric_chain(0.3), Vector::Zero(2));
    CHECK(evaluate_discounted(zero, 0.9).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("evaluate: symmetric chain against the truncated series") {
    Vector r(2);
    r << 0.0, 1.0;
    const auto chain = make_chain(oracle::symmetric_chain(0.1), r);
    const auto v = oracle::to_vec(evaluate_discounted(chain, 0.5));
    const auto series = oracle::truncated_series(oracle::to_dense(chain.transition), {0.0, 1.0}, 0.5, 10000);
    CHECK(oracle::sup_diff(v, series) <= 1e-12);
}

TEST_CASE("evaluate: fixed-point residual on random chains") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto mdp = random_ergodic_mdp(4, 2, seed, 0.01);
        const Policy pi({static_cast<int>(seed % 2), 1, 0, 1});
        for (double gamma : {0.5, 0.9, 0.99}) {
            const auto chain = induce(mdp, pi);
            const auto v = evaluate_discounted(chain, gamma);
            const double residual = (chain.reward + gamma * chain.transition * v - v).cwiseAbs().maxCoeff();
            CHECK(residual <= 1e-10);
        }
    }
}

TEST_CASE("evaluate rejects gamma outside (0,1)") {
    const auto chain = make_chain(Matrix::Ones(1, 1), Vector::Ones(1));
    CHECK_THROWS_AS(evaluate_discounted(chain, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(evaluate_discounted(chain, 0.0), std::invalid_argument);
}

TEST_CASE("solve_bellman: single state picks the larger reward") {
    const auto mdp = TabularMdp::from_tables({{0.2, 0.7}}, {{{1.0}, {1.0}}});
    const auto sol = solve_bellman(mdp, std::nullopt, 0.5);
    CHECK(sol.value(0) == doctest::Approx(1.4).epsilon(1e-14));
    CHECK(sol.policy[0] == 1);
    CHECK(sol.residual <= 1e-12);
}

TEST_CASE("solve_bellman: action-independent MDP reduces to policy evaluation") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto mdp = action_independent(seed);
        const auto sol = solve_bellman(mdp, std::nullopt, 0.9);
        const auto v = evaluate_discounted(mdp, Policy({0, 0, 0}), 0.9);
        CHECK((sol.value - v).cwiseAbs().maxCoeff() <= 1e-12);
        // Every action ties; the lowest index wins.
        CHECK(sol.policy == Policy({0, 0, 0}));
    }
}

TEST_CASE("solve_bellman agrees with policy enumeration") {
    std::mt19937_64 rng(11);
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const int ns = 1 + static_cast<int>(rng() % 3);
        const int na = 1 + static_cast<int>(rng() % 4);
        const auto mdp = random_ergodic_mdp(ns, na, seed, 0.5 / ns);
        if (std::pow(na, ns) > 64) continue;
        for (double gamma : {0.5, 0.9, 0.99}) {
            const auto sol = solve_bellman(mdp, std::nullopt, gamma);
            const auto ref = oracle::enumerate_optimal(mdp, gamma);
            CHECK(oracle::sup_diff(oracle::to_vec(sol.value), ref.value) <= 1e-8);
            CHECK(sol.policy.actions() == ref.policy);
            ++checked;
        }
    }
    CHECK(checked > 60);
}

TEST_CASE("solve_bellman honours the reward override") {
    const auto mdp = TabularMdp::from_tables({{0.2, 0.7}}, {{{1.0}, {1.0}}});
    Matrix r(1, 2);
    r << 0.9, 0.1;
    const auto sol = solve_bellman(mdp, r, 0.5);
    CHECK(sol.policy[0] == 0);
    CHECK(sol.value(0) == doctest::Approx(1.8).epsilon(1e-14));
    CHECK_THROWS_AS(solve_bellman(mdp, Matrix(2, 2), 0.5), InvalidMdpError);
    CHECK_THROWS_AS(solve_bellman(mdp, std::nullopt, 0.5, 0.0), std::invalid_argument);
}

TEST_CASE("solve_bellman: Bellman equation and dominance on random instances") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto mdp = random_ergodic_mdp(4, 3, 100 + seed, 0.02);
        const auto sol = solve_bellman(mdp, std::nullopt, 0.9);
        CHECK(bellman_residual(mdp, mdp.rewards(), 0.9, sol.value) <= 1e-9);
        const Policy pi({static_cast<int>(seed % 3), static_cast<int>((seed / 3) % 3), 1, 2});
        const auto v = evaluate_discounted(mdp, pi, 0.9);
        CHECK((v - sol.value).maxCoeff() <= 1e-9);
    }
}

TEST_CASE("solve_bellman converges for gamma close to one") {
    const auto mdp = hard_instance({0.01, 0.2, 2});
    const auto sol = solve_bellman(mdp, std::nullopt, 0.9999);
    CHECK(sol.policy == Policy({0, 0}));
    CHECK(sol.residual <= 1e-9);
}

TEST_CASE("value iteration cap grows with the horizon") {
    CHECK(value_iteration_cap(0.5, 1e-10) < value_iteration_cap(0.9, 1e-10));
    CHECK(value_iteration_cap(0.9, 1e-10) < value_iteration_cap(0.99, 1e-10));
    CHECK(value_iteration_cap(0.9, 1e-4) < value_iteration_cap(0.9, 1e-10));
}

TEST_CASE("greedy policy") {
    const auto mdp = random_ergodic_mdp(3, 3, 5, 0.05);
    const auto at_zero = greedy_policy(mdp, std::nullopt, 0.9, Vector::Zero(3));
    for (int s = 0; s < 3; ++s) {
        Eigen::Index best = 0;
        mdp.rewards().row(s).maxCoeff(&best);
        CHECK(at_zero[s] == best);
    }

    // Exact ties keep the lower index.
    const auto tied = TabularMdp::from_tables({{0.4, 0.7, 0.7}}, {{{1.0}, {1.0}, {1.0}}});
    CHECK(greedy_policy(tied, std::nullopt, 0.5, Vector::Zero(1))[0] == 1);

    const auto small = random_ergodic_mdp(3, 2, 17, 0.05);
    const auto ref = oracle::enumerate_optimal(small, 0.9);
    Vector vstar = Vector::Map(ref.value.data(), 3);
    CHECK(greedy_policy(small, std::nullopt, 0.9, vstar).actions() == ref.policy);
}

TEST_CASE("q values") {
    const auto mdp = random_ergodic_mdp(2, 2, 3, 0.05);
    Vector v(2);
    v << 1.0, 2.0;
    const auto q = q_values(mdp, mdp.rewards(), 0.9, v);
    for (int s = 0; s < 2; ++s)
        for (int a = 0; a < 2; ++a)
            CHECK(q(s, a) == doctest::Approx(mdp.reward(s, a) + 0.9 * (mdp.transition(s, a, 0) * 1.0 +
                                                                       mdp.transition(s, a, 1) * 2.0)));
}

TEST_CASE("sigma") {
    const auto det = TabularMdp::from_tables({{0.0}, {0.0}}, {{{1.0, 0.0}}, {{0.5, 0.5}}});
    Vector v(2);
    v << 0.0, 1.0;
    const auto sd = sigma(det, v);
    CHECK(sd(0, 0) == 0.0);
    CHECK(sd(1, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(sigma(det, Vector::Constant(2, 3.3)).cwiseAbs().maxCoeff() <= 1e-7);
    CHECK((sigma(random_ergodic_mdp(4, 2, 1, 0.01), Vector::Constant(4, 0.123)).array() >= 0.0).all());
}

TEST_CASE("auxiliary value sequence") {
    const auto mdp = hard_instance({0.1, 0.2, 2});
    const Policy pi({0, 0});

    const auto zero = aux_value_sequence(mdp, pi, Matrix::Zero(2, 2), 0.9, 3);
    REQUIRE(zero.size() == 4);
    for (const auto& level : zero) {
        CHECK(level.h.cwiseAbs().maxCoeff() == 0.0);
        CHECK(level.v.cwiseAbs().maxCoeff() == 0.0);
    }

    const auto base = aux_value_sequence(mdp, pi, mdp.rewards(), 0.9, 0);
    REQUIRE(base.size() == 1);
    CHECK(base[0].h == induce(mdp, pi).reward);
    CHECK((base[0].v - evaluate_discounted(mdp, pi, 0.9)).cwiseAbs().maxCoeff() <= 1e-14);

    // Two-point variances by hand on the symmetric chain.
    const auto seq = aux_value_sequence(mdp, pi, mdp.rewards(), 0.75, 1);
    REQUIRE(seq.size() == 2);
    const double v0 = seq[0].v(0);
    const double v1 = seq[0].v(1);
    const double diff = std::abs(v1 - v0);
    const double expected = std::sqrt(0.1 * 0.9) * diff;
    CHECK(seq[1].h(0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(seq[1].h(1) == doctest::Approx(expected).epsilon(1e-12));

    CHECK_THROWS_AS(aux_value_sequence(mdp, pi, mdp.rewards(), 0.9, 65), std::invalid_argument);
    CHECK_THROWS_AS(aux_value_sequence(mdp, pi, mdp.rewards(), 0.9, -1), std::invalid_argument);
    CHECK(default_aux_levels(0.99) == 3);
    CHECK(default_aux_levels(0.5) == 0);
    CHECK(default_aux_levels(0.999) == 4);
}

TEST_CASE("span and auxiliary bounds on uniformly ergodic instances") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto mdp = random_ergodic_mdp(3, 2, 300 + seed, 0.05);
        const auto report = mdp_ergodicity(mdp);
        for (double gamma : {0.9, 0.99}) {
            for (const auto& pi : oracle::all_policies(3, 2)) {
                const auto seq = aux_value_sequence(mdp, Policy(pi), mdp.rewards(), gamma, 1);
                CHECK(span_seminorm(seq[0].v) <= 3.0 * report.t_minorize);
                CHECK(seq[1].v.cwiseAbs().maxCoeff() <= 80.0 * std::sqrt(report.t_minorize) / (1.0 - gamma));
            }
        }
    }
}

}
