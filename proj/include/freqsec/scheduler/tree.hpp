#pragma once

#include <string>
#include <vector>

namespace freqsec::scheduler {

// One node of the wind scenario tree. Times are hours measured from the
// current scheduling instant; the root covers [0, 1).
struct TreeNode {
    int id = 0;
    int parent = -1;  // -1 for the root
    double prob = 1.0;
    double dt_hours = 1.0;
    double start_hour = 0.0;
    double demand[2] = {0.0, 0.0};  // MW, averaged over the node interval
    double wind[2] = {0.0, 0.0};    // MW available
};

struct ScenarioTree {
    std::vector<TreeNode> nodes;  // topological order, root first

    void validate() const;
    double lookahead_hours() const;
};

// Hourly demand/wind profile per region, indexed by absolute hour.
struct HourlyProfile {
    std::vector<double> demand1, demand2, wind1, wind2;

    std::size_t hours() const { return demand1.size(); }
};

HourlyProfile read_profile_csv(const std::string& path);
std::string profile_to_csv(const HourlyProfile& profile);

// Branching setup: the root hour is deterministic, then the remaining
// lookahead splits into quantile scenarios whose node durations follow
// step_hours. Wind deviations grow with lead time up to sigma_saturate_h.
struct TreeConfig {
    std::vector<double> branch_probs{0.25, 0.5, 0.25};
    std::vector<double> branch_z{-1.15, 0.0, 1.15};
    std::vector<double> step_hours{1, 1, 1, 1, 4, 7, 8};
    double rel_sigma = 0.15;
    double sigma_saturate_h = 8.0;
    double wind_cap_per_region = 30000.0;  // MW

    void validate() const;
    double lookahead_hours() const;
};

// Builds the tree for scheduling instant `hour0` from the profile (which
// must cover hour0 .. hour0 + lookahead - 1).
ScenarioTree build_tree(const HourlyProfile& profile, std::size_t hour0,
                        const TreeConfig& config);

}  // namespace freqsec::scheduler
