#include "amdpkit/report.hpp"

#include <cmath>

namespace amdp {

using nlohmann::json;

json to_json(const Policy& policy) { return json(policy.actions()); }

json to_json(const ValueVector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json to_json(const ErgodicityReport& report) {
    json per_policy = json::array();
    for (const auto& entry : report.per_policy) {
        per_policy.push_back({{"policy", to_json(entry.policy)},
                              {"t_mix", entry.t_mix},
                              {"t_minorize", entry.minorization.t_minorize},
                              {"best_m", entry.minorization.best_m},
                              {"q", entry.minorization.q}});
    }
    return json{{"t_mix", report.t_mix},
                {"t_minorize", report.t_minorize},
                {"best_m", report.best_m},
                {"q_at_best_m", report.q_at_best_m},
                {"sandwich",
                 {{"lower", report.t_minorize},
                  {"middle", 22.0 * report.t_mix},
                  {"upper", 22.0 * std::log(16.0) * report.t_minorize},
                  {"holds", report.sandwich_holds()}}},
                {"per_policy", std::move(per_policy)}};
}

json to_json(const ReductionPlan& plan) {
    return json{{"epsilon", plan.epsilon},       {"delta", plan.delta},
                {"t_minorize", plan.t_minorize}, {"gamma", plan.gamma},
                {"zeta", plan.zeta},             {"beta", plan.beta},
                {"eta_star", plan.eta_star},     {"constant", plan.constant},
                {"n_per_sa", plan.n_per_sa},     {"total_samples", plan.total_samples}};
}

json to_json(const LearnedPolicy& learned) {
    json out{{"policy", to_json(learned.policy)},
             {"empirical_value", to_json(learned.empirical_value)},
             {"gamma", learned.gamma},
             {"zeta", learned.zeta},
             {"n_per_sa", learned.n_per_sa},
             {"samples_used", learned.samples_used},
             {"seed", learned.seed},
             {"residual", learned.residual}};
    if (learned.plan) out["plan"] = to_json(*learned.plan);
    return out;
}

json to_json(const RegressionResult& fit) {
    json points = json::array();
    for (const auto& [x, y] : fit.points) points.push_back({x, y});
    return json{{"slope", fit.slope},
                {"intercept", fit.intercept},
                {"r_squared", fit.r_squared},
                {"points", std::move(points)}};
}

}  // namespace amdp
