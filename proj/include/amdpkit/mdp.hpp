#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace amdp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Value-like vectors (v, u, h) are plain Eigen vectors indexed by state.
using ValueVector = Vector;

// ----------------------------------------------------------------------------
// Errors
// ----------------------------------------------------------------------------

struct InvalidMdpError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidPolicyError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotErgodicError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EnumerationInfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IterationLimitError : std::runtime_error {
    IterationLimitError(const std::string& what, double residual)
        : std::runtime_error(what), residual(residual) {}
    double residual;
};

/// Largest policy class enumerated exhaustively.
inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 20;

/// Kernel rows must sum to one within this tolerance.
inline constexpr double kRowSumTolerance = 1e-12;

// ----------------------------------------------------------------------------
// Policy
// ----------------------------------------------------------------------------

/// Deterministic stationary policy: one action index per state.
class Policy {
public:
    Policy() = default;
    explicit Policy(std::vector<int> actions) : actions_(std::move(actions)) {}

    [[nodiscard]] std::size_t size() const { return actions_.size(); }
    [[nodiscard]] int operator[](std::size_t s) const { return actions_[s]; }
    [[nodiscard]] const std::vector<int>& actions() const { return actions_; }

    friend bool operator==(const Policy&, const Policy&) = default;
    friend auto operator<=>(const Policy& a, const Policy& b) { return a.actions_ <=> b.actions_; }

private:
    std::vector<int> actions_;
};

std::string to_string(const Policy& policy);

// ----------------------------------------------------------------------------
// TabularMdp
// ----------------------------------------------------------------------------

/// Finite MDP with rewards r(s,a) and kernel rows p_{s,a}.
///
/// The kernel is stored as a dense (|S|*|A|) x |S| matrix whose row
/// `s * n_actions + a` is p_{s,a}. The constructor only checks shapes; value
/// invariants (row sums, reward range) are reported by validate().
class TabularMdp {
public:
    TabularMdp(Matrix rewards, Matrix kernel);

    /// Builds from nested tables: rewards[s][a] and kernel[s][a][s'].
    static TabularMdp from_tables(const std::vector<std::vector<double>>& rewards,
                                  const std::vector<std::vector<std::vector<double>>>& kernel);

    [[nodiscard]] int n_states() const { return static_cast<int>(rewards_.rows()); }
    [[nodiscard]] int n_actions() const { return static_cast<int>(rewards_.cols()); }

    [[nodiscard]] double reward(int s, int a) const { return rewards_(s, a); }
    [[nodiscard]] const Matrix& rewards() const { return rewards_; }

    [[nodiscard]] auto row(int s, int a) const { return kernel_.row(row_index(s, a)); }
    [[nodiscard]] double transition(int s, int a, int next) const {
        return kernel_(row_index(s, a), next);
    }
    [[nodiscard]] const Matrix& kernel() const { return kernel_; }

    [[nodiscard]] Eigen::Index row_index(int s, int a) const {
        return static_cast<Eigen::Index>(s) * n_actions() + a;
    }

    /// Same kernel, different reward table.
    [[nodiscard]] TabularMdp with_rewards(Matrix rewards) const;

private:
    Matrix rewards_;
    Matrix kernel_;
};

/// Checks the value invariants: kernel rows non-negative and summing to one
/// within kRowSumTolerance, rewards in [0, reward_upper]. Returns the first
/// violation, or nullopt when the MDP is valid.
std::optional<std::string> validate(const TabularMdp& mdp, double reward_upper = 1.0);

/// Throws InvalidMdpError if validate() reports a violation.
void require_valid(const TabularMdp& mdp, double reward_upper = 1.0);

/// Throws InvalidPolicyError unless the policy has one in-range action per state.
void require_valid(const TabularMdp& mdp, const Policy& policy);

// ----------------------------------------------------------------------------
// Induced chain
// ----------------------------------------------------------------------------

/// Markov chain (P_pi, r_pi) obtained by fixing a policy.
struct InducedChain {
    Matrix transition;
    Vector reward;

    [[nodiscard]] int n_states() const { return static_cast<int>(transition.rows()); }
};

InducedChain induce(const TabularMdp& mdp, const Policy& policy);

/// Same as induce() but with rewards taken from an override table R(s,a).
InducedChain induce(const TabularMdp& mdp, const Matrix& rewards, const Policy& policy);

/// Builds a chain from a transition matrix alone (reward zero).
InducedChain make_chain(Matrix transition, Vector reward = {});

// ----------------------------------------------------------------------------
// Policy enumeration
// ----------------------------------------------------------------------------

/// |A|^|S|, or nullopt on overflow of 64 bits.
std::optional<std::uint64_t> policy_count(const TabularMdp& mdp);

/// Visits every deterministic policy in lexicographic order (state 0 most
/// significant). Throws EnumerationInfeasibleError when |A|^|S| > cap.
void for_each_policy(const TabularMdp& mdp, const std::function<void(const Policy&)>& visit,
                     std::uint64_t cap = kDefaultEnumerationCap);

// ----------------------------------------------------------------------------
// Vector utilities
// ----------------------------------------------------------------------------

/// max_i v_i - min_i v_i.
double span_seminorm(const ValueVector& v);

[[nodiscard]] bool all_finite(const ValueVector& v);

}  // namespace amdp
