#pragma once

#include "amdpkit/mdp.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace amdp {

struct LoadedMdp {
    TabularMdp mdp;
    /// One entry per kernel row that was renormalized on load.
    std::vector<std::string> warnings;
};

/// Parses the interchange schema
/// `{"n_states", "n_actions", "rewards": [[..]], "kernel": [[[..]]]}`.
/// Rows whose sum is within kRowSumTolerance of one are renormalized and
/// reported in `warnings`; any other violation throws InvalidMdpError.
LoadedMdp mdp_from_json(const nlohmann::json& doc);
LoadedMdp load_mdp(const std::filesystem::path& path);

nlohmann::json mdp_to_json(const TabularMdp& mdp);
void save_mdp(const TabularMdp& mdp, const std::filesystem::path& path);

}  // namespace amdp
