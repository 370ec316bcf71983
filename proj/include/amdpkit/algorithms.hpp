#pragma once

#include "amdpkit/exact_dp.hpp"
#include "amdpkit/mdp.hpp"
#include "amdpkit/sampling.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace amdp {

/// Sample-size constant of the reduction, 4 * 486^2.
inline constexpr double kReductionConstant = 4.0 * 486.0 * 486.0;

/// beta_delta(eta) = 2 ln(24 |S||A| log2(1/(1-gamma)) / ((1-gamma)^2 eta delta)).
double beta_delta(double eta, double delta, double gamma, int n_states, int n_actions);

/// eta*_delta = zeta delta (1-gamma) / (9 |S| |A|^2).
double eta_star(double zeta, double delta, double gamma, int n_states, int n_actions);

/// Smallest n for which the discounted error bound applies: 64 beta / (1-gamma).
double min_sample_size(double beta, double gamma);

/// Uniform reward perturbation R = r + Z with Z(s,a) ~ Unif(0, zeta) i.i.d.
struct PerturbationSpec {
    double zeta = 0.0;
    Matrix perturbed_rewards;
    Matrix z_values;
};

PerturbationSpec perturb_rewards(const TabularMdp& mdp, double zeta, std::uint64_t seed);

/// Parameters of one reduction run.
struct ReductionPlan {
    double epsilon = 0.0;
    double delta = 0.0;
    double t_minorize = 0.0;
    double gamma = 0.0;
    double zeta = 0.0;
    double beta = 0.0;
    double eta_star = 0.0;
    /// Sample-size constant c actually used.
    double constant = kReductionConstant;
    std::int64_t n_per_sa = 0;
    std::int64_t total_samples = 0;
};

struct PlanOptions {
    double constant = kReductionConstant;
    /// Raise n to 64 beta / (1-gamma) when the formula falls below it.
    bool enforce_min_samples = true;
};

enum class Reducer { ours, baseline };

std::string to_string(Reducer reducer);
Reducer parse_reducer(const std::string& name);

/// gamma = 1 - eps/(19 t), zeta = (1-gamma) t / 4, n = ceil(c beta / ((1-gamma)^2 t)).
ReductionPlan plan_reduction(double epsilon, double delta, double t_minorize, int n_states,
                             int n_actions, const PlanOptions& options = {});

/// Same gamma and zeta, worst-case sizing n = ceil(c beta / ((1-gamma)^3 t^2)).
ReductionPlan plan_baseline(double epsilon, double delta, double t_minorize, int n_states,
                            int n_actions, const PlanOptions& options = {});

ReductionPlan plan_for(Reducer reducer, double epsilon, double delta, double t_minorize,
                       int n_states, int n_actions, const PlanOptions& options = {});

/// Real-valued (pre-ceiling, no minimum-sample floor) per-pair sample size of a plan.
double planned_sample_size(Reducer reducer, double epsilon, double delta, double t_minorize,
                           int n_states, int n_actions, double constant);

struct LearnedPolicy {
    Policy policy;
    /// Optimal value of the perturbed empirical DMDP.
    ValueVector empirical_value;
    double gamma = 0.0;
    double zeta = 0.0;
    std::int64_t n_per_sa = 0;
    std::optional<ReductionPlan> plan;
    std::int64_t samples_used = 0;
    std::uint64_t seed = 0;
    /// Bellman residual of empirical_value on M(R, P_hat, gamma).
    double residual = 0.0;
};

/// Perturbed model-based planning: perturb rewards, build the empirical kernel
/// from n draws per pair, solve M(R, P_hat, gamma) and return its greedy policy.
/// `seed` drives the reward perturbation; the kernel draws come from `gm`.
LearnedPolicy pmbp(GenerativeModel& gm, double gamma, double zeta, std::int64_t n,
                   std::uint64_t seed, double tol = kDefaultSolveTolerance);

/// Runs pmbp with an explicit plan.
LearnedPolicy run_plan(GenerativeModel& gm, const ReductionPlan& plan, std::uint64_t seed,
                       double tol = kDefaultSolveTolerance);

LearnedPolicy solve_amdp(GenerativeModel& gm, double epsilon, double delta, double t_minorize,
                         std::uint64_t seed, const PlanOptions& options = {});

/// Reduction with the (1-gamma)^{-3} worst-case DMDP sizing. Throws
/// std::length_error when the plan needs more than `budget` total samples.
LearnedPolicy solve_amdp_baseline(GenerativeModel& gm, double epsilon, double delta,
                                  double t_minorize, std::uint64_t seed,
                                  const PlanOptions& options = {},
                                  std::int64_t budget = std::int64_t{1} << 62);

}  // namespace amdp
