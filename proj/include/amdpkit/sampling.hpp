#pragma once

#include "amdpkit/mdp.hpp"

#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

namespace amdp {

/// Empirical kernel p_hat_{s,a}(s') = counts(s,a,s') / n.
class EmpiricalModel {
public:
    EmpiricalModel(int n_states, int n_actions, std::int64_t n_per_sa,
                   std::vector<std::int64_t> counts);

    [[nodiscard]] int n_states() const { return n_states_; }
    [[nodiscard]] int n_actions() const { return n_actions_; }
    [[nodiscard]] std::int64_t n_per_sa() const { return n_per_sa_; }
    [[nodiscard]] std::int64_t count(int s, int a, int next) const {
        return counts_[index(s, a, next)];
    }
    [[nodiscard]] double frequency(int s, int a, int next) const {
        return static_cast<double>(count(s, a, next)) / static_cast<double>(n_per_sa_);
    }
    /// (|S||A|) x |S| matrix of frequencies, rows ordered like TabularMdp::kernel().
    [[nodiscard]] Matrix frequencies() const;

private:
    [[nodiscard]] std::size_t index(int s, int a, int next) const {
        return (static_cast<std::size_t>(s) * n_actions_ + a) * n_states_ + next;
    }

    int n_states_;
    int n_actions_;
    std::int64_t n_per_sa_;
    std::vector<std::int64_t> counts_;
};

/// Seeded sampler of next states from a hidden ground-truth MDP.
///
/// Each (s,a) pair owns a counter-based stream keyed by (seed, s, a); draw k
/// of that stream is a pure function of (seed, s, a, k). Streams of distinct
/// pairs may be used concurrently; draws within one stream are sequential.
class GenerativeModel {
public:
    GenerativeModel(TabularMdp source, std::uint64_t seed);

    GenerativeModel(const GenerativeModel&) = delete;
    GenerativeModel& operator=(const GenerativeModel&) = delete;

    [[nodiscard]] int n_states() const { return source_.n_states(); }
    [[nodiscard]] int n_actions() const { return source_.n_actions(); }
    [[nodiscard]] std::uint64_t seed() const { return seed_; }

    /// Inverse-CDF draw from p_{s,a}.
    int draw_next_state(int s, int a);

    /// Exactly n draws for every (s,a). Throws std::invalid_argument if n < 1
    /// or the total count would overflow.
    EmpiricalModel build_empirical_kernel(std::int64_t n);

    [[nodiscard]] std::uint64_t samples_drawn(int s, int a) const;
    [[nodiscard]] std::uint64_t total_samples_drawn() const;

    /// Ground truth; not to be consulted by learners.
    [[nodiscard]] const TabularMdp& source() const { return source_; }

private:
    struct Stream {
        std::vector<double> cdf;
        std::uint64_t key = 0;
        std::atomic<std::uint64_t> drawn{0};
    };

    [[nodiscard]] std::size_t pair(int s, int a) const {
        return static_cast<std::size_t>(s) * n_actions() + a;
    }

    TabularMdp source_;
    std::uint64_t seed_;
    std::unique_ptr<Stream[]> streams_;
};

/// Packages (R, P_hat) as an MDP. Perturbed rewards R = r + Z may reach
/// 1 + zeta, so the reward range check is relaxed to [0, 1 + zeta].
TabularMdp empirical_mdp(const EmpiricalModel& em, const Matrix& rewards, double zeta = 0.0);

}  // namespace amdp
