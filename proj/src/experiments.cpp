#include "amdpkit/experiments.hpp"

#include "amdpkit/average_reward.hpp"
#include "amdpkit/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace amdp {

// ----------------------------------------------------------------------------
// Regression
// ----------------------------------------------------------------------------

std::optional<RegressionResult> fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) return std::nullopt;
    RegressionResult fit;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::nullopt;
        fit.points.emplace_back(std::log10(x[i]), std::log10(y[i]));
    }
    const double n = static_cast<double>(fit.points.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (const auto& [lx, ly] : fit.points) {
        mean_x += lx;
        mean_y += ly;
    }
    mean_x /= n;
    mean_y /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& [lx, ly] : fit.points) {
        sxx += (lx - mean_x) * (lx - mean_x);
        sxy += (lx - mean_x) * (ly - mean_y);
        syy += (ly - mean_y) * (ly - mean_y);
    }
    if (sxx <= 0.0) return std::nullopt;
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

// ----------------------------------------------------------------------------
// Worker pool
// ----------------------------------------------------------------------------

int worker_count(int requested) {
    int workers = requested > 0 ? requested
                                : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* cap = std::getenv("AMDPKIT_THREADS")) {
        const int limit = std::atoi(cap);
        if (limit > 0) workers = std::min(workers, limit);
    }
    return std::max(1, workers);
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task) {
    workers = std::max(1, std::min<int>(workers, static_cast<int>(std::max<std::size_t>(count, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next.store(count);
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t config, std::size_t rep) {
    return base_seed ^ hash_key({static_cast<std::uint64_t>(config), static_cast<std::uint64_t>(rep)});
}

// ----------------------------------------------------------------------------
// Replications
// ----------------------------------------------------------------------------

ExperimentRecord run_replication(const TabularMdp& mdp, double optimal_gain, Reducer algo,
                                 const ReductionPlan& plan, int replication, std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    GenerativeModel gm(mdp, seed);
    const auto learned = run_plan(gm, plan, seed);

    const Vector estimate = (1.0 - learned.gamma) * learned.empirical_value;
    Eigen::Index worst = 0;
    (estimate.array() - optimal_gain).abs().maxCoeff(&worst);

    ExperimentRecord record;
    record.algo = algo;
    record.t_minorize = plan.t_minorize;
    record.epsilon_target = plan.epsilon;
    record.n_per_sa = plan.n_per_sa;
    record.total_samples = learned.samples_used;
    record.replication = replication;
    record.seed = seed;
    record.alpha_hat = average_reward(induce(mdp, learned.policy));
    record.gain_estimate = estimate(worst);
    record.error = std::abs(record.gain_estimate - optimal_gain);
    record.policy_gap = optimal_gain - record.alpha_hat;
    record.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - start)
                              .count();
    return record;
}

namespace {

struct SweepConfig {
    TabularMdp mdp;
    double optimal_gain;
    ReductionPlan plan;
    double x;
};

SweepResult run_sweep(const std::vector<SweepConfig>& configs, Reducer algo, int reps,
                      std::uint64_t seed, int threads) {
    if (reps < 1) throw std::invalid_argument("reps must be at least 1");
    SweepResult result;
    const std::size_t per = static_cast<std::size_t>(reps);
    result.records.resize(configs.size() * per);
    parallel_for(result.records.size(), worker_count(threads), [&](std::size_t i) {
        const std::size_t c = i / per;
        const std::size_t r = i % per;
        const auto& config = configs[c];
        result.records[i] = run_replication(config.mdp, config.optimal_gain, algo, config.plan,
                                            static_cast<int>(r), replication_seed(seed, c, r));
    });

    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t c = 0; c < configs.size(); ++c) {
        SweepPoint point{configs[c].x, 0.0, 0.0};
        for (std::size_t r = 0; r < per; ++r) {
            point.mean_error += result.records[c * per + r].error;
            point.mean_policy_gap += result.records[c * per + r].policy_gap;
        }
        point.mean_error /= static_cast<double>(per);
        point.mean_policy_gap /= static_cast<double>(per);
        result.points.push_back(point);
        xs.push_back(point.x);
        ys.push_back(point.mean_error);
    }
    result.regression = fit_loglog(xs, ys);
    if (!result.regression) {
        result.warnings.push_back("regression undefined: need at least two configurations with "
                                  "positive mean error");
    }
    return result;
}

}  // namespace

double implied_epsilon(Reducer algo, std::int64_t n_per_sa, double delta, double t_minorize,
                       int n_states, int n_actions, double constant) {
    const auto size_at = [&](double eps) {
        return planned_sample_size(algo, eps, delta, t_minorize, n_states, n_actions, constant);
    };
    const double n = static_cast<double>(n_per_sa);
    if (size_at(1.0) > n) {
        std::ostringstream msg;
        msg << to_string(algo) << " needs at least " << std::ceil(size_at(1.0))
            << " samples per pair even at epsilon = 1; got " << n_per_sa;
        throw std::invalid_argument(msg.str());
    }
    // Planned size decreases in epsilon; bisect on log epsilon.
    double lo = std::log(1e-12);
    double hi = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (size_at(std::exp(mid)) > n) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::exp(hi);
}

SweepResult eps_sweep(const EpsSweepConfig& config) {
    if (config.budgets.empty()) throw std::invalid_argument("budget grid is empty");
    const double theta = calibrate_theta(config.t_minorize);
    const auto mdp = hard_instance({theta, config.kappa, 2});
    const auto optimal = optimal_average_reward(mdp);
    const auto pairs = static_cast<std::int64_t>(mdp.n_states()) * mdp.n_actions();

    std::vector<SweepConfig> configs;
    for (double budget : config.budgets) {
        const auto n = static_cast<std::int64_t>(std::floor(budget / static_cast<double>(pairs)));
        if (n * pairs > config.budget_cap) {
            std::ostringstream msg;
            msg << "configuration needs " << n * pairs << " total samples, above the cap of "
                << config.budget_cap;
            throw std::length_error(msg.str());
        }
        if (n < 1) throw std::invalid_argument("budget below one sample per pair");
        const double eps = implied_epsilon(config.algo, n, config.delta, config.t_minorize,
                                           mdp.n_states(), mdp.n_actions(), config.constant);
        auto plan = plan_for(config.algo, eps, config.delta, config.t_minorize, mdp.n_states(),
                             mdp.n_actions(), {config.constant, false});
        plan.n_per_sa = n;
        plan.total_samples = n * pairs;
        configs.push_back({mdp, optimal.gain, plan, static_cast<double>(plan.total_samples)});
    }
    return run_sweep(configs, config.algo, config.reps, config.seed, config.threads);
}

SweepResult tminorize_sweep(const TminorizeSweepConfig& config) {
    if (config.targets.empty()) throw std::invalid_argument("target list is empty");
    if (!(config.C > 0.0)) throw std::invalid_argument("C must be positive");
    std::vector<SweepConfig> configs;
    for (double target : config.targets) {
        const double theta = calibrate_theta(target);
        auto mdp = hard_instance({theta, config.kappa, 2});
        const auto optimal = optimal_average_reward(mdp);
        auto plan = plan_for(config.algo, config.epsilon, config.delta, target, mdp.n_states(),
                             mdp.n_actions());
        plan.n_per_sa = static_cast<std::int64_t>(std::ceil(config.C * target));
        plan.total_samples = plan.n_per_sa * mdp.n_states() * mdp.n_actions();
        configs.push_back({std::move(mdp), optimal.gain, plan, target});
    }
    auto result = run_sweep(configs, config.algo, config.reps, config.seed, config.threads);
    if (config.targets.size() < 2) {
        result.warnings.push_back("single target: slope is undefined");
    }
    return result;
}

// ----------------------------------------------------------------------------
// Grids and output
// ----------------------------------------------------------------------------

std::vector<double> log_grid(double first, double last, int count) {
    if (!(first > 0.0) || !(last >= first) || count < 1) {
        throw std::invalid_argument("log grid needs 0 < a <= b and k >= 1");
    }
    if (count == 1) return {first};
    std::vector<double> grid(count);
    const double step = std::log10(last / first) / (count - 1);
    for (int i = 0; i < count; ++i) grid[i] = first * std::pow(10.0, step * i);
    grid.back() = last;
    return grid;
}

std::vector<double> parse_log_grid(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream in(spec);
    for (std::string part; std::getline(in, part, ':');) parts.push_back(part);
    if (parts.size() != 3) throw std::invalid_argument("grid must have the form a:b:k");
    try {
        return log_grid(std::stod(parts[0]), std::stod(parts[1]), std::stoi(parts[2]));
    } catch (const std::logic_error&) {
        throw std::invalid_argument("cannot parse grid '" + spec + "'");
    }
}

void write_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
    out << "algo,t_minorize,epsilon_target,n_per_sa,total_samples,replication,seed,alpha_hat,"
           "gain_estimate,error,policy_gap,wall_time_ms\n";
    out << std::setprecision(17);
    for (const auto& r : records) {
        out << to_string(r.algo) << ',' << r.t_minorize << ',' << r.epsilon_target << ','
            << r.n_per_sa << ',' << r.total_samples << ',' << r.replication << ',' << r.seed << ','
            << r.alpha_hat << ',' << r.gain_estimate << ',' << r.error << ',' << r.policy_gap << ','
            << r.wall_time_ms << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const std::vector<ExperimentRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_csv(out, records);
}

void write_svg(const std::filesystem::path& path, const std::string& title,
               const std::string& x_label, const std::vector<PlotSeries>& series) {
    constexpr double width = 640.0;
    constexpr double height = 480.0;
    constexpr double margin = 70.0;

    double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
    for (const auto& s : series) {
        for (const auto& p : s.points) {
            if (p.x <= 0.0 || p.mean_error <= 0.0) continue;
            x_min = std::min(x_min, std::log10(p.x));
            x_max = std::max(x_max, std::log10(p.x));
            y_min = std::min(y_min, std::log10(p.mean_error));
            y_max = std::max(y_max, std::log10(p.mean_error));
        }
    }
    if (x_min > x_max) {
        x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
    }
    const double x_pad = std::max(0.05, 0.05 * (x_max - x_min));
    const double y_pad = std::max(0.05, 0.1 * (y_max - y_min));
    x_min -= x_pad, x_max += x_pad, y_min -= y_pad, y_max += y_pad;

    const auto px = [&](double lx) { return margin + (lx - x_min) / (x_max - x_min) * (width - 2 * margin); };
    const auto py = [&](double ly) {
        return height - margin - (ly - y_min) / (y_max - y_min) * (height - 2 * margin);
    };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << std::fixed << std::setprecision(2);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title
        << "</text>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
        << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
        << height - margin << "\" stroke=\"black\"/>\n";
    for (int k = static_cast<int>(std::ceil(x_min)); k <= static_cast<int>(std::floor(x_max)); ++k) {
        out << "<text x=\"" << px(k) << "\" y=\"" << height - margin + 18
            << "\" text-anchor=\"middle\">1e" << k << "</text>\n";
    }
    for (int k = static_cast<int>(std::ceil(y_min)); k <= static_cast<int>(std::floor(y_max)); ++k) {
        out << "<text x=\"" << margin - 8 << "\" y=\"" << py(k) + 4 << "\" text-anchor=\"end\">1e" << k
            << "</text>\n";
    }
    out << "<text x=\"" << width / 2 << "\" y=\"" << height - 20 << "\" text-anchor=\"middle\">"
        << x_label << " (log10)</text>\n";
    out << "<text x=\"18\" y=\"" << height / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << height / 2 << ")\">mean error (log10)</text>\n";

    double legend_y = margin;
    for (const auto& s : series) {
        for (const auto& p : s.points) {
            if (p.x <= 0.0 || p.mean_error <= 0.0) continue;
            out << "<circle cx=\"" << px(std::log10(p.x)) << "\" cy=\"" << py(std::log10(p.mean_error))
                << "\" r=\"4\" fill=\"" << s.color << "\"/>\n";
        }
        std::ostringstream label;
        label << s.label;
        if (s.regression) {
            const auto& fit = *s.regression;
            const double lx0 = fit.points.front().first;
            const double lx1 = fit.points.back().first;
            out << "<line x1=\"" << px(lx0) << "\" y1=\"" << py(fit.intercept + fit.slope * lx0)
                << "\" x2=\"" << px(lx1) << "\" y2=\"" << py(fit.intercept + fit.slope * lx1)
                << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
            label << std::setprecision(3) << " (slope " << fit.slope << ")";
        }
        out << "<text x=\"" << width - margin << "\" y=\"" << legend_y << "\" text-anchor=\"end\" fill=\""
            << s.color << "\">" << label.str() << "</text>\n";
        legend_y += 16;
    }
    out << "</svg>\n";
}

}  // namespace amdp
