#pragma once

#include "amdpkit/algorithms.hpp"
#include "amdpkit/instances.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace amdp {

/// Outcome of one replication of a reducer on a known MDP.
///
/// `alpha_hat` is the exact gain of the returned policy. `gain_estimate` is
/// the learner's own estimate of the optimal gain, the normalized empirical
/// value (1-gamma) v_hat_0(s) at the state where it deviates most from the
/// true optimal gain; `error` is that deviation. `policy_gap` is the optimal
/// gain minus `alpha_hat`.
struct ExperimentRecord {
    Reducer algo = Reducer::ours;
    double t_minorize = 0.0;
    double epsilon_target = 0.0;
    std::int64_t n_per_sa = 0;
    std::int64_t total_samples = 0;
    int replication = 0;
    std::uint64_t seed = 0;
    double alpha_hat = 0.0;
    double gain_estimate = 0.0;
    double error = 0.0;
    double policy_gap = 0.0;
    std::int64_t wall_time_ms = 0;
};

struct RegressionResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    /// (log10 x, log10 mean error) per configuration.
    std::vector<std::pair<double, double>> points;
};

/// Ordinary least squares of log10(y) on log10(x). Returns nullopt with fewer
/// than two points, a non-positive coordinate, or identical x values.
std::optional<RegressionResult> fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct SweepPoint {
    double x = 0.0;
    double mean_error = 0.0;
    double mean_policy_gap = 0.0;
};

struct SweepResult {
    std::vector<ExperimentRecord> records;
    std::vector<SweepPoint> points;
    std::optional<RegressionResult> regression;
    std::vector<std::string> warnings;
};

/// Worker count: `requested` if positive, else hardware concurrency, capped by
/// the AMDPKIT_THREADS environment variable when set.
int worker_count(int requested = 0);

/// Runs task(i) for i in [0, count) on a pool of `workers` threads.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task);

/// Seed of replication `rep` of configuration `config`.
std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t config, std::size_t rep);

/// Runs one replication of `plan` against `mdp`, whose optimal gain is
/// `optimal_gain`.
ExperimentRecord run_replication(const TabularMdp& mdp, double optimal_gain, Reducer algo,
                                 const ReductionPlan& plan, int replication, std::uint64_t seed);

/// Sample-size constant of the desk-scale sweeps.
inline constexpr double kSweepConstant = 0.02;

struct EpsSweepConfig {
    double t_minorize = 10.0;
    double kappa = 0.2;
    /// Total-sample budgets, one configuration each.
    std::vector<double> budgets;
    int reps = 50;
    Reducer algo = Reducer::ours;
    std::uint64_t seed = 1;
    double delta = 0.1;
    double constant = kSweepConstant;
    /// Configurations above this many total samples are rejected.
    std::int64_t budget_cap = 1'000'000'000;
    int threads = 0;
};

/// Target accuracy at which a reducer's plan (without the minimum-sample
/// floor) uses `n_per_sa` samples per pair. Throws std::invalid_argument when
/// even epsilon = 1 needs more.
double implied_epsilon(Reducer algo, std::int64_t n_per_sa, double delta, double t_minorize,
                       int n_states, int n_actions, double constant);

/// For each budget, derives the implied epsilon, runs `reps` replications on
/// the calibrated hard instance and regresses log mean error on log total
/// samples. Invalid configurations are rejected before any sampling.
SweepResult eps_sweep(const EpsSweepConfig& config);

struct TminorizeSweepConfig {
    std::vector<double> targets;
    /// n_per_sa = ceil(C * t_minorize).
    double C = 4500.0;
    int reps = 30;
    double epsilon = 0.5;
    double delta = 0.1;
    double kappa = 0.2;
    Reducer algo = Reducer::ours;
    std::uint64_t seed = 1;
    int threads = 0;
};

/// For each target, calibrates the hard instance, runs the reducer with
/// n_per_sa = ceil(C t) at the plan's gamma and zeta for the nominal epsilon,
/// and regresses log mean error on log t.
SweepResult tminorize_sweep(const TminorizeSweepConfig& config);

/// Log-spaced grid a:b:k -> k values from a to b inclusive.
std::vector<double> log_grid(double first, double last, int count);
std::vector<double> parse_log_grid(const std::string& spec);

/// CSV with one header row, columns in ExperimentRecord field order.
void write_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);
void write_csv(const std::filesystem::path& path, const std::vector<ExperimentRecord>& records);

struct PlotSeries {
    std::string label;
    std::string color;
    std::vector<SweepPoint> points;
    std::optional<RegressionResult> regression;
};

/// Log-log scatter of per-configuration mean errors with regression lines.
void write_svg(const std::filesystem::path& path, const std::string& title,
               const std::string& x_label, const std::vector<PlotSeries>& series);

}  // namespace amdp
