#include "amdpkit/mdp_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace amdp {

using nlohmann::json;

LoadedMdp mdp_from_json(const json& doc) {
    int n_states = 0;
    int n_actions = 0;
    std::vector<std::vector<double>> rewards;
    std::vector<std::vector<std::vector<double>>> kernel;
    try {
        n_states = doc.at("n_states").get<int>();
        n_actions = doc.at("n_actions").get<int>();
        rewards = doc.at("rewards").get<std::vector<std::vector<double>>>();
        kernel = doc.at("kernel").get<std::vector<std::vector<std::vector<double>>>>();
    } catch (const json::exception& e) {
        throw InvalidMdpError(std::string("malformed MDP document: ") + e.what());
    }
    if (n_states < 1 || n_actions < 1) {
        throw InvalidMdpError("n_states and n_actions must be positive");
    }
    if (static_cast<int>(rewards.size()) != n_states ||
        static_cast<int>(rewards.front().size()) != n_actions) {
        throw InvalidMdpError("rewards table does not match n_states x n_actions");
    }

    std::vector<std::string> warnings;
    for (int s = 0; s < static_cast<int>(kernel.size()); ++s) {
        for (int a = 0; a < static_cast<int>(kernel[s].size()); ++a) {
            auto& row = kernel[s][a];
            double sum = 0.0;
            bool nonneg = true;
            for (double p : row) {
                sum += p;
                nonneg = nonneg && p >= 0.0;
            }
            // Rows off by a few ulps are left alone so that save/load round-trips.
            const double drift = std::abs(sum - 1.0);
            if (nonneg && drift > 8.0 * std::numeric_limits<double>::epsilon() &&
                drift <= kRowSumTolerance) {
                for (double& p : row) p /= sum;
                warnings.push_back("renormalized kernel row (s=" + std::to_string(s) +
                                   ",a=" + std::to_string(a) + ")");
            }
        }
    }

    auto mdp = TabularMdp::from_tables(rewards, kernel);
    require_valid(mdp);
    return {std::move(mdp), std::move(warnings)};
}

LoadedMdp load_mdp(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw InvalidMdpError(path.string() + ": " + e.what());
    }
    return mdp_from_json(doc);
}

json mdp_to_json(const TabularMdp& mdp) {
    json rewards = json::array();
    json kernel = json::array();
    for (int s = 0; s < mdp.n_states(); ++s) {
        json r_row = json::array();
        json k_state = json::array();
        for (int a = 0; a < mdp.n_actions(); ++a) {
            r_row.push_back(mdp.reward(s, a));
            json p_row = json::array();
            for (int next = 0; next < mdp.n_states(); ++next) {
                p_row.push_back(mdp.transition(s, a, next));
            }
            k_state.push_back(std::move(p_row));
        }
        rewards.push_back(std::move(r_row));
        kernel.push_back(std::move(k_state));
    }
    return json{{"n_states", mdp.n_states()},
                {"n_actions", mdp.n_actions()},
                {"rewards", std::move(rewards)},
                {"kernel", std::move(kernel)}};
}

void save_mdp(const TabularMdp& mdp, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << mdp_to_json(mdp).dump(2) << '\n';
}

}  // namespace amdp
