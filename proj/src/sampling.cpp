#include "amdpkit/sampling.hpp"

#include "amdpkit/rng.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace amdp {

EmpiricalModel::EmpiricalModel(int n_states, int n_actions, std::int64_t n_per_sa,
                               std::vector<std::int64_t> counts)
    : n_states_(n_states), n_actions_(n_actions), n_per_sa_(n_per_sa), counts_(std::move(counts)) {
    if (n_per_sa_ < 1) throw std::invalid_argument("n_per_sa must be positive");
    if (counts_.size() != static_cast<std::size_t>(n_states) * n_actions * n_states) {
        throw std::invalid_argument("count table has the wrong size");
    }
    for (int s = 0; s < n_states_; ++s) {
        for (int a = 0; a < n_actions_; ++a) {
            std::int64_t total = 0;
            for (int next = 0; next < n_states_; ++next) {
                if (count(s, a, next) < 0) throw std::invalid_argument("negative count");
                total += count(s, a, next);
            }
            if (total != n_per_sa_) {
                throw std::invalid_argument("counts at (s=" + std::to_string(s) + ",a=" +
                                            std::to_string(a) + ") do not sum to n");
            }
        }
    }
}

Matrix EmpiricalModel::frequencies() const {
    Matrix p(static_cast<Eigen::Index>(n_states_) * n_actions_, n_states_);
    for (int s = 0; s < n_states_; ++s) {
        for (int a = 0; a < n_actions_; ++a) {
            for (int next = 0; next < n_states_; ++next) {
                p(static_cast<Eigen::Index>(s) * n_actions_ + a, next) = frequency(s, a, next);
            }
        }
    }
    return p;
}

GenerativeModel::GenerativeModel(TabularMdp source, std::uint64_t seed)
    : source_(std::move(source)), seed_(seed) {
    require_valid(source_);
    const int n = n_states();
    streams_ = std::make_unique<Stream[]>(static_cast<std::size_t>(n) * n_actions());
    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < n_actions(); ++a) {
            Stream& stream = streams_[pair(s, a)];
            stream.key = hash_key({seed_, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(a)});
            stream.cdf.resize(n);
            double acc = 0.0;
            int last_positive = 0;
            for (int next = 0; next < n; ++next) {
                const double p = source_.transition(s, a, next);
                acc += p;
                stream.cdf[next] = acc;
                if (p > 0.0) last_positive = next;
            }
            // Rounding in the cumulative sum must never let u fall off the end.
            for (int next = last_positive; next < n; ++next) stream.cdf[next] = 2.0;
        }
    }
}

namespace {

inline int invert_cdf(const std::vector<double>& cdf, double u) {
    int next = 0;
    while (u >= cdf[next]) ++next;
    return next;
}

// Draw k of a stream: mix64(key + (k + 1) * gamma).
inline double uniform_at(std::uint64_t key, std::uint64_t k) {
    return to_unit(mix64(key + (k + 1) * kGoldenGamma));
}

}  // namespace

int GenerativeModel::draw_next_state(int s, int a) {
    if (s < 0 || s >= n_states() || a < 0 || a >= n_actions()) {
        throw std::out_of_range("state-action pair out of range");
    }
    Stream& stream = streams_[pair(s, a)];
    const std::uint64_t k = stream.drawn.fetch_add(1, std::memory_order_relaxed);
    return invert_cdf(stream.cdf, uniform_at(stream.key, k));
}

EmpiricalModel GenerativeModel::build_empirical_kernel(std::int64_t n) {
    if (n < 1) throw std::invalid_argument("sample size n must be at least 1");
    const auto pairs = static_cast<std::int64_t>(n_states()) * n_actions();
    if (n > std::numeric_limits<std::int64_t>::max() / pairs) {
        throw std::invalid_argument("sample size n overflows the sample counters");
    }

    const int ns = n_states();
    std::vector<std::int64_t> counts(static_cast<std::size_t>(pairs) * ns, 0);
    for (int s = 0; s < ns; ++s) {
        for (int a = 0; a < n_actions(); ++a) {
            Stream& stream = streams_[pair(s, a)];
            const std::uint64_t start =
                stream.drawn.fetch_add(static_cast<std::uint64_t>(n), std::memory_order_relaxed);
            std::int64_t* row = counts.data() + pair(s, a) * ns;
            const auto& cdf = stream.cdf;
            std::uint64_t state = stream.key + (start + 1) * kGoldenGamma;
            if (ns == 2) {
                const double threshold = cdf[0];
                std::int64_t first = 0;
                for (std::int64_t i = 0; i < n; ++i, state += kGoldenGamma) {
                    first += to_unit(mix64(state)) < threshold;
                }
                row[0] = first;
                row[1] = n - first;
            } else {
                for (std::int64_t i = 0; i < n; ++i, state += kGoldenGamma) {
                    ++row[invert_cdf(cdf, to_unit(mix64(state)))];
                }
            }
        }
    }
    return EmpiricalModel(ns, n_actions(), n, std::move(counts));
}

std::uint64_t GenerativeModel::samples_drawn(int s, int a) const {
    return streams_[pair(s, a)].drawn.load(std::memory_order_relaxed);
}

std::uint64_t GenerativeModel::total_samples_drawn() const {
    std::uint64_t total = 0;
    for (int s = 0; s < n_states(); ++s) {
        for (int a = 0; a < n_actions(); ++a) total += samples_drawn(s, a);
    }
    return total;
}

TabularMdp empirical_mdp(const EmpiricalModel& em, const Matrix& rewards, double zeta) {
    TabularMdp mdp(rewards, em.frequencies());
    require_valid(mdp, 1.0 + zeta);
    return mdp;
}

}  // namespace amdp
