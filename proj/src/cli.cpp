#include "amdpkit/cli.hpp"

#include "amdpkit/average_reward.hpp"
#include "amdpkit/ergodicity.hpp"
#include "amdpkit/exact_dp.hpp"
#include "amdpkit/experiments.hpp"
#include "amdpkit/instances.hpp"
#include "amdpkit/mdp_io.hpp"
#include "amdpkit/report.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

namespace amdp {

namespace {

using nlohmann::json;

struct GenInstanceArgs {
    std::optional<double> t_minorize;
    std::optional<double> theta;
    double kappa = 0.2;
    int actions = 2;
    bool random = false;
    int states = 3;
    std::uint64_t seed = 1;
    double min_prob = 0.05;
    std::string out;
};

struct ErgodicityArgs {
    std::string mdp;
    int m_max = kDefaultLagCap;
};

struct SolveDmdpArgs {
    std::string mdp;
    double gamma = 0.9;
    double zeta = 0.0;
    std::optional<std::int64_t> n;
    std::uint64_t seed = 1;
};

struct SolveAmdpArgs {
    std::string mdp;
    double eps = 0.5;
    double delta = 0.1;
    std::string t_minorize = "auto";
    std::uint64_t seed = 1;
    std::string algo = "ours";
    double constant = kReductionConstant;
    std::int64_t budget = 1'000'000'000;
};

struct SweepArgs {
    std::string algo = "ours";
    int reps = 0;
    std::uint64_t seed = 1;
    std::string out;
    std::string plot;
    std::string grid;
    std::string targets;
    double t_minorize = 10.0;
    double kappa = 0.2;
    double eps = 0.5;
    double delta = 0.1;
    double C = 4500.0;
    double constant = kSweepConstant;
    std::int64_t budget = 1'000'000'000;
    int threads = 0;
    bool full_scale = false;
};

void print(std::ostream& out, const json& doc) { out << std::setw(2) << doc << '\n'; }

int gen_instance(const GenInstanceArgs& args, std::ostream& out, std::ostream& err) {
    TabularMdp mdp = [&] {
        if (args.random) return random_ergodic_mdp(args.states, args.actions, args.seed, args.min_prob);
        double theta = 0.05;
        if (args.theta) {
            theta = *args.theta;
        } else if (args.t_minorize) {
            theta = calibrate_theta(*args.t_minorize);
        }
        return hard_instance({theta, args.kappa, args.actions});
    }();
    if (args.out.empty()) {
        print(out, mdp_to_json(mdp));
    } else {
        save_mdp(mdp, args.out);
        err << "wrote " << args.out << '\n';
    }
    return 0;
}

TabularMdp load(const std::string& path, std::ostream& err) {
    auto loaded = load_mdp(path);
    for (const auto& warning : loaded.warnings) err << "warning: " << warning << '\n';
    return std::move(loaded.mdp);
}

int ergodicity(const ErgodicityArgs& args, std::ostream& out, std::ostream& err) {
    const auto mdp = load(args.mdp, err);
    print(out, to_json(mdp_ergodicity(mdp, args.m_max)));
    return 0;
}

int solve_dmdp(const SolveDmdpArgs& args, std::ostream& out, std::ostream& err) {
    const auto mdp = load(args.mdp, err);
    const auto exact = solve_bellman(mdp, std::nullopt, args.gamma);
    json doc{{"gamma", args.gamma},
             {"exact", {{"value", to_json(exact.value)},
                        {"policy", to_json(exact.policy)},
                        {"iterations", exact.iterations},
                        {"residual", exact.residual}}}};
    if (args.n) {
        GenerativeModel gm(mdp, args.seed);
        const auto learned = pmbp(gm, args.gamma, args.zeta, *args.n, args.seed);
        const auto value = evaluate_discounted(mdp, learned.policy, args.gamma);
        doc["learned"] = to_json(learned);
        doc["learned"]["true_value"] = to_json(value);
        doc["learned"]["value_gap"] = (exact.value - value).maxCoeff();
    }
    print(out, doc);
    return 0;
}

int solve_amdp_cmd(const SolveAmdpArgs& args, std::ostream& out, std::ostream& err) {
    const auto mdp = load(args.mdp, err);
    double t_minorize = 0.0;
    if (args.t_minorize == "auto") {
        t_minorize = mdp_ergodicity(mdp).t_minorize;
    } else {
        try {
            t_minorize = std::stod(args.t_minorize);
        } catch (const std::logic_error&) {
            throw CLI::ValidationError("--tminorize", "expected a number or 'auto'");
        }
    }
    const Reducer algo = parse_reducer(args.algo);
    const PlanOptions options{args.constant, true};
    GenerativeModel gm(mdp, args.seed);
    const auto learned = algo == Reducer::ours
                             ? solve_amdp(gm, args.eps, args.delta, t_minorize, args.seed, options)
                             : solve_amdp_baseline(gm, args.eps, args.delta, t_minorize, args.seed,
                                                   options, args.budget);
    const double alpha_hat = average_reward(induce(mdp, learned.policy));
    json doc{{"algo", to_string(algo)},
             {"plan", to_json(*learned.plan)},
             {"policy", to_json(learned.policy)},
             {"alpha_hat", alpha_hat},
             {"gain_estimate", to_json(((1.0 - learned.gamma) * learned.empirical_value).eval())},
             {"samples_used", learned.samples_used},
             {"seed", args.seed}};
    try {
        const auto optimal = optimal_average_reward(mdp);
        doc["optimal_gain"] = optimal.gain;
        doc["gap"] = optimal.gain - alpha_hat;
    } catch (const EnumerationInfeasibleError&) {
        err << "note: policy class too large to compute the optimal gain exactly\n";
    }
    print(out, doc);
    return 0;
}

void emit_sweep(const SweepResult& result, const SweepArgs& args, const std::string& title,
                const std::string& x_label, const std::string& label, std::ostream& out,
                std::ostream& err) {
    for (const auto& warning : result.warnings) err << "warning: " << warning << '\n';
    if (!args.out.empty()) write_csv(args.out, result.records);
    if (!args.plot.empty()) {
        write_svg(args.plot, title, x_label,
                  {{label, label == "baseline" ? "#1f4fbf" : "#c0392b", result.points, result.regression}});
    }
    json points = json::array();
    for (const auto& p : result.points) {
        points.push_back({{"x", p.x}, {"mean_error", p.mean_error}, {"mean_policy_gap", p.mean_policy_gap}});
    }
    json doc{{"points", std::move(points)}, {"records", result.records.size()}};
    if (result.regression) {
        doc["regression"] = to_json(*result.regression);
        doc["slope"] = result.regression->slope;
    } else {
        doc["slope"] = nullptr;
    }
    print(out, doc);
}

int eps_sweep_cmd(const SweepArgs& args, std::ostream& out, std::ostream& err) {
    EpsSweepConfig config;
    config.algo = parse_reducer(args.algo);
    config.t_minorize = args.t_minorize;
    config.kappa = args.kappa;
    config.reps = args.reps > 0 ? args.reps : (args.full_scale ? 300 : 50);
    config.seed = args.seed;
    config.delta = args.delta;
    config.constant = args.constant;
    config.budget_cap = args.budget;
    config.threads = args.threads;
    config.budgets = parse_log_grid(args.grid.empty() ? "4e5:1.6e7:5" : args.grid);
    const auto result = eps_sweep(config);
    emit_sweep(result, args, "error vs total samples", "total samples", args.algo, out, err);
    return 0;
}

int tminorize_sweep_cmd(const SweepArgs& args, std::ostream& out, std::ostream& err) {
    TminorizeSweepConfig config;
    config.algo = parse_reducer(args.algo);
    config.targets = parse_log_grid(!args.targets.empty() ? args.targets
                                    : args.full_scale     ? "10:1000:5"
                                                          : "10:100:3");
    config.C = args.C;
    config.reps = args.reps > 0 ? args.reps : (args.full_scale ? 300 : 30);
    config.seed = args.seed;
    config.epsilon = args.eps;
    config.delta = args.delta;
    config.kappa = args.kappa;
    config.threads = args.threads;
    const auto result = tminorize_sweep(config);
    emit_sweep(result, args, "error vs minorization time", "t_minorize", args.algo, out, err);
    return 0;
}

void add_sweep_options(CLI::App* cmd, SweepArgs& args) {
    cmd->add_option("--algo", args.algo, "Reducer: ours or baseline")
        ->check(CLI::IsMember({"ours", "baseline"}));
    cmd->add_option("--reps", args.reps, "Replications per configuration");
    cmd->add_option("--seed", args.seed, "Base seed");
    cmd->add_option("--out", args.out, "CSV output path");
    cmd->add_option("--plot", args.plot, "SVG output path");
    cmd->add_option("--kappa", args.kappa, "Suboptimality knob of the hard instance");
    cmd->add_option("--delta", args.delta, "Failure probability");
    cmd->add_option("--threads", args.threads, "Worker threads (0 = all cores)");
    cmd->add_flag("--full-scale", args.full_scale, "Replication counts and ranges of the full study");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sample-efficient policy learning for uniformly ergodic average-reward MDPs"};
    app.require_subcommand(1);

    GenInstanceArgs gen_args;
    auto* gen = app.add_subcommand("gen-instance", "Write a hard or random MDP as JSON");
    gen->add_option("--tminorize", gen_args.t_minorize, "Target minorization time of the hard instance");
    gen->add_option("--theta", gen_args.theta, "Switching probability of the hard instance");
    gen->add_option("--kappa", gen_args.kappa, "Suboptimality knob");
    gen->add_option("--actions", gen_args.actions, "Number of actions");
    gen->add_flag("--random", gen_args.random, "Random ergodic MDP instead of the hard instance");
    gen->add_option("--states", gen_args.states, "Number of states (random MDPs)");
    gen->add_option("--seed", gen_args.seed, "Seed (random MDPs)");
    gen->add_option("--min-prob", gen_args.min_prob, "Kernel floor (random MDPs)");
    gen->add_option("--out", gen_args.out, "Output path (stdout when omitted)");

    ErgodicityArgs erg_args;
    auto* erg = app.add_subcommand("ergodicity", "Mixing and minorization times of an MDP");
    erg->add_option("--mdp", erg_args.mdp, "MDP JSON file")->required();
    erg->add_option("--m-max", erg_args.m_max, "Largest lag examined");

    SolveDmdpArgs dmdp_args;
    auto* dmdp = app.add_subcommand("solve-dmdp", "Exact discounted solve, optionally with PMBP");
    dmdp->add_option("--mdp", dmdp_args.mdp, "MDP JSON file")->required();
    dmdp->add_option("--gamma", dmdp_args.gamma, "Discount factor");
    dmdp->add_option("--zeta", dmdp_args.zeta, "Reward perturbation amplitude");
    dmdp->add_option("--n", dmdp_args.n, "Samples per state-action pair (runs PMBP)");
    dmdp->add_option("--seed", dmdp_args.seed, "Seed");

    SolveAmdpArgs amdp_args;
    auto* amdp_cmd = app.add_subcommand("solve-amdp", "Learn an epsilon-optimal average-reward policy");
    amdp_cmd->add_option("--mdp", amdp_args.mdp, "MDP JSON file")->required();
    amdp_cmd->add_option("--eps", amdp_args.eps, "Target accuracy in (0,1]");
    amdp_cmd->add_option("--delta", amdp_args.delta, "Failure probability");
    amdp_cmd->add_option("--tminorize", amdp_args.t_minorize, "Minorization time, or 'auto'");
    amdp_cmd->add_option("--seed", amdp_args.seed, "Seed");
    amdp_cmd->add_option("--algo", amdp_args.algo, "Reducer: ours or baseline")
        ->check(CLI::IsMember({"ours", "baseline"}));
    amdp_cmd->add_option("--c", amdp_args.constant, "Sample-size constant");
    amdp_cmd->add_option("--budget", amdp_args.budget, "Largest total sample count for the baseline");

    auto* experiment = app.add_subcommand("experiment", "Replication sweeps");
    experiment->require_subcommand(1);

    SweepArgs eps_args;
    auto* eps_cmd = experiment->add_subcommand("eps-sweep", "Error against total sample budget");
    add_sweep_options(eps_cmd, eps_args);
    eps_cmd->add_option("--grid", eps_args.grid, "Total-sample budgets a:b:k (log-spaced)");
    eps_cmd->add_option("--tminorize", eps_args.t_minorize, "Minorization time of the instance");
    eps_cmd->add_option("--c", eps_args.constant, "Sample-size constant used to invert the plan");
    eps_cmd->add_option("--budget", eps_args.budget, "Largest total sample count per configuration");

    SweepArgs t_args;
    auto* t_cmd = experiment->add_subcommand("tminorize-sweep", "Error against minorization time");
    add_sweep_options(t_cmd, t_args);
    t_cmd->add_option("--targets", t_args.targets, "Minorization times a:b:k (log-spaced)");
    t_cmd->add_option("--C", t_args.C, "Samples per pair per unit of minorization time");
    t_cmd->add_option("--eps", t_args.eps, "Nominal accuracy fixing gamma and zeta");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }

    try {
        if (*gen) return gen_instance(gen_args, out, err);
        if (*erg) return ergodicity(erg_args, out, err);
        if (*dmdp) return solve_dmdp(dmdp_args, out, err);
        if (*amdp_cmd) return solve_amdp_cmd(amdp_args, out, err);
        if (*eps_cmd) return eps_sweep_cmd(eps_args, out, err);
        if (*t_cmd) return tminorize_sweep_cmd(t_args, out, err);
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

}  // namespace amdp
