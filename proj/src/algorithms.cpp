#include "amdpkit/algorithms.hpp"

#include "amdpkit/rng.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace amdp {

namespace {

constexpr std::uint64_t kPerturbationTag = 0x7a657461ULL;  // "zeta"

void require_discount(double gamma) {
    if (!(gamma >= 0.5 && gamma < 1.0)) {
        throw std::invalid_argument("discount factor must lie in [1/2, 1)");
    }
}

std::int64_t ceil_count(double n) {
    if (!std::isfinite(n) || n >= 9.2e18) {
        throw std::overflow_error("planned sample size is not representable");
    }
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(n)));
}

struct Discount {
    double gamma;
    double zeta;
    double eta;
    double beta;
};

Discount discount_for(double epsilon, double delta, double t_minorize, int n_states, int n_actions) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in (0,1]");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
    if (!(t_minorize >= 1.0)) throw std::invalid_argument("t_minorize must be at least 1");
    const double gap = epsilon / (19.0 * t_minorize);
    const double gamma = 1.0 - gap;
    if (gamma < 0.5) throw std::invalid_argument("planned discount factor falls below 1/2");
    const double zeta = 0.25 * gap * t_minorize;
    const double eta = eta_star(zeta, delta, gamma, n_states, n_actions);
    return {gamma, zeta, eta, beta_delta(eta, delta, gamma, n_states, n_actions)};
}

double raw_size(Reducer reducer, const Discount& d, double t_minorize, double constant) {
    const double gap = 1.0 - d.gamma;
    if (reducer == Reducer::ours) return constant * d.beta / (gap * gap * t_minorize);
    return constant * d.beta / (gap * gap * gap * t_minorize * t_minorize);
}

}  // namespace

double beta_delta(double eta, double delta, double gamma, int n_states, int n_actions) {
    require_discount(gamma);
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in (0,1]");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
    const double gap = 1.0 - gamma;
    const double arg = 24.0 * n_states * n_actions * std::log2(1.0 / gap) / (gap * gap * eta * delta);
    const double beta = 2.0 * std::log(arg);
    if (!std::isfinite(beta)) throw std::domain_error("beta_delta is not finite");
    return beta;
}

double eta_star(double zeta, double delta, double gamma, int n_states, int n_actions) {
    if (!(zeta > 0.0)) throw std::invalid_argument("zeta must be positive");
    return zeta * delta * (1.0 - gamma) /
           (9.0 * n_states * static_cast<double>(n_actions) * n_actions);
}

double min_sample_size(double beta, double gamma) { return 64.0 * beta / (1.0 - gamma); }

PerturbationSpec perturb_rewards(const TabularMdp& mdp, double zeta, std::uint64_t seed) {
    if (!(zeta >= 0.0)) throw std::invalid_argument("zeta must be non-negative");
    SplitMix64 rng(hash_key({seed, kPerturbationTag}));
    Matrix z(mdp.n_states(), mdp.n_actions());
    for (int s = 0; s < mdp.n_states(); ++s) {
        for (int a = 0; a < mdp.n_actions(); ++a) z(s, a) = zeta * rng.uniform();
    }
    return PerturbationSpec{zeta, mdp.rewards() + z, z};
}

std::string to_string(Reducer reducer) { return reducer == Reducer::ours ? "ours" : "baseline"; }

Reducer parse_reducer(const std::string& name) {
    if (name == "ours") return Reducer::ours;
    if (name == "baseline") return Reducer::baseline;
    throw std::invalid_argument("unknown algorithm '" + name + "' (expected ours or baseline)");
}

double planned_sample_size(Reducer reducer, double epsilon, double delta, double t_minorize,
                           int n_states, int n_actions, double constant) {
    const auto d = discount_for(epsilon, delta, t_minorize, n_states, n_actions);
    return raw_size(reducer, d, t_minorize, constant);
}

ReductionPlan plan_for(Reducer reducer, double epsilon, double delta, double t_minorize,
                       int n_states, int n_actions, const PlanOptions& options) {
    if (!(options.constant > 0.0)) throw std::invalid_argument("sample constant must be positive");
    const auto d = discount_for(epsilon, delta, t_minorize, n_states, n_actions);
    double n = raw_size(reducer, d, t_minorize, options.constant);
    if (options.enforce_min_samples) n = std::max(n, min_sample_size(d.beta, d.gamma));

    ReductionPlan plan;
    plan.epsilon = epsilon;
    plan.delta = delta;
    plan.t_minorize = t_minorize;
    plan.gamma = d.gamma;
    plan.zeta = d.zeta;
    plan.beta = d.beta;
    plan.eta_star = d.eta;
    plan.constant = options.constant;
    plan.n_per_sa = ceil_count(n);
    const auto pairs = static_cast<std::int64_t>(n_states) * n_actions;
    if (plan.n_per_sa > std::numeric_limits<std::int64_t>::max() / pairs) {
        throw std::overflow_error("planned total sample count overflows");
    }
    plan.total_samples = plan.n_per_sa * pairs;
    return plan;
}

ReductionPlan plan_reduction(double epsilon, double delta, double t_minorize, int n_states,
                             int n_actions, const PlanOptions& options) {
    return plan_for(Reducer::ours, epsilon, delta, t_minorize, n_states, n_actions, options);
}

ReductionPlan plan_baseline(double epsilon, double delta, double t_minorize, int n_states,
                            int n_actions, const PlanOptions& options) {
    return plan_for(Reducer::baseline, epsilon, delta, t_minorize, n_states, n_actions, options);
}

LearnedPolicy pmbp(GenerativeModel& gm, double gamma, double zeta, std::int64_t n,
                   std::uint64_t seed, double tol) {
    require_discount(gamma);
    if (n < 1) throw std::invalid_argument("sample size n must be at least 1");

    const auto perturbation = perturb_rewards(gm.source(), zeta, seed);
    const auto before = gm.total_samples_drawn();
    const auto empirical = gm.build_empirical_kernel(n);
    const auto model = empirical_mdp(empirical, perturbation.perturbed_rewards, zeta);
    auto solution = solve_bellman(model, std::nullopt, gamma, tol);

    LearnedPolicy out;
    out.policy = std::move(solution.policy);
    out.empirical_value = std::move(solution.value);
    out.gamma = gamma;
    out.zeta = zeta;
    out.n_per_sa = n;
    out.samples_used = static_cast<std::int64_t>(gm.total_samples_drawn() - before);
    out.seed = seed;
    out.residual = solution.residual;
    return out;
}

LearnedPolicy run_plan(GenerativeModel& gm, const ReductionPlan& plan, std::uint64_t seed, double tol) {
    auto learned = pmbp(gm, plan.gamma, plan.zeta, plan.n_per_sa, seed, tol);
    learned.plan = plan;
    return learned;
}

LearnedPolicy solve_amdp(GenerativeModel& gm, double epsilon, double delta, double t_minorize,
                         std::uint64_t seed, const PlanOptions& options) {
    const auto plan =
        plan_reduction(epsilon, delta, t_minorize, gm.n_states(), gm.n_actions(), options);
    return run_plan(gm, plan, seed);
}

LearnedPolicy solve_amdp_baseline(GenerativeModel& gm, double epsilon, double delta,
                                  double t_minorize, std::uint64_t seed,
                                  const PlanOptions& options, std::int64_t budget) {
    const auto plan =
        plan_baseline(epsilon, delta, t_minorize, gm.n_states(), gm.n_actions(), options);
    if (plan.total_samples > budget) {
        std::ostringstream msg;
        msg << "baseline plan needs " << plan.total_samples << " samples, above the budget of "
            << budget;
        throw std::length_error(msg.str());
    }
    return run_plan(gm, plan, seed);
}

}  // namespace amdp
