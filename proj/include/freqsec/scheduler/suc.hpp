#pragma once

// Frequency-secured stochastic unit commitment over a scenario tree with
// clustered thermal units, two regional balances, one corridor, wind
// curtailment, load shedding and the security rows enforced at every node.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "freqsec/constraints/security.hpp"
#include "freqsec/dynamics/batch.hpp"
#include "freqsec/scheduler/fleet.hpp"
#include "freqsec/scheduler/milp.hpp"
#include "freqsec/scheduler/tree.hpp"

namespace freqsec::scheduler {

enum class FrequencyMode { Off, CoiOnly, Regional };

const char* frequency_mode_name(FrequencyMode m);
FrequencyMode frequency_mode_from_name(const std::string& name);

struct SucOptions {
    double c_ls = 30000.0;           // value of lost load, per MWh shed
    double corridor_limit = 7500.0;  // MW; infinity removes the limit
    std::array<double, 2> penalty_h{0.0, 0.0};  // explicit inertia price per MW*s per hour
    std::array<double, 2> penalty_r{0.0, 0.0};  // explicit PFR price per MW per hour
    FrequencyMode mode = FrequencyMode::Regional;
    double d1 = 0.005;  // load damping factors used to fold node demand
    double d2 = 0.005;
    milp::Options mip;
    // Tiny lexicographic terms so reported volumes are well defined when the
    // true objective is indifferent: procured PFR costs a hair, using wind
    // (the export region slightly first) saves a hair.
    double tie_break_r = 1e-3;
    std::array<double, 2> tie_break_wind{-1e-3, -2e-3};
};

// Commitment state carried between rolling-horizon builds.
struct RollingState {
    std::vector<int> n_up;                        // per class, online now
    std::vector<std::vector<int>> pipeline;       // per class: arrivals in k hours, k < startup time
    std::vector<std::vector<int>> recent_starts;  // per class, [0] = one hour ago
    std::vector<std::vector<int>> recent_stops;
    std::vector<double> prev_p;                   // per class MW; empty disables root ramp rows

    static RollingState cold(const std::vector<GeneratorClass>& classes);
};

struct NodeDecision {
    std::vector<int> n_up, n_sg, n_sd;  // per class
    std::vector<double> p, r;           // per class, MW
    std::array<double, 2> wind_used{0.0, 0.0};
    std::array<double, 2> p_ls{0.0, 0.0};
    double flow = 0.0;  // MW, region 2 -> region 1 positive
    std::array<double, 2> h_region{0.0, 0.0};  // MW*s, post-loss in the faulted region
    std::array<double, 2> r_region{0.0, 0.0};  // MW
    std::array<double, 2> h_procured{0.0, 0.0};  // MW*s, before subtracting the lost unit
    double cost_startup = 0.0, cost_noload = 0.0, cost_marginal = 0.0;
    double cost_loadshed = 0.0, cost_penalty = 0.0;

    double cost() const {
        return cost_startup + cost_noload + cost_marginal + cost_loadshed + cost_penalty;
    }
};

struct Schedule {
    std::vector<NodeDecision> decisions;  // per tree node
    double objective = 0.0;  // solved objective (includes the tie-break terms)
    double cost = 0.0;       // probability-weighted true cost
    milp::Status status = milp::Status::Infeasible;
    double gap = 0.0;
    long mip_nodes = 0;
    std::string infeasibility_hint;  // set when status == Infeasible
};

struct SucModel {
    milp::Instance instance;
    // variable index maps, -1 where a variable does not exist
    std::vector<std::vector<int>> v_up, v_sg, v_sd, v_p, v_r;  // [node][class]
    std::vector<std::array<int, 2>> v_wind, v_pls;             // [node][region]
    std::vector<int> v_flow;                                   // [node]
    std::vector<int> v_st_root;                                // [class]
};

// Assembles the MILP. `pack` may be null only when options.mode == Off.
SucModel build_milp(const std::vector<GeneratorClass>& classes, const ScenarioTree& tree,
                    const constraints::SecurityConstraintSet* pack, const SucOptions& options,
                    const RollingState& state);

// Solves and decodes; runs the independent solution audit before returning.
Schedule solve(const SucModel& model, const std::vector<GeneratorClass>& classes,
               const ScenarioTree& tree, const constraints::SecurityConstraintSet* pack,
               const SucOptions& options, const RollingState& state);

// Re-checks a schedule against raw data: bounds, balances, commitment
// linking, min-up/down counting, corridor, frequency rows and the objective
// recomputation. Returns true when clean; appends messages otherwise.
bool audit_schedule(const Schedule& schedule, const std::vector<GeneratorClass>& classes,
                    const ScenarioTree& tree, const constraints::SecurityConstraintSet* pack,
                    const SucOptions& options, const RollingState& state,
                    std::vector<std::string>* messages = nullptr);

struct SecurityAuditResult {
    bool ok = false;
    double max_rocof_1 = 0.0, max_rocof_2 = 0.0;
    double nadir_1 = 0.0, nadir_2 = 0.0;
    std::string message;
};

// Simulates the credible loss at one node decision and checks the post-fault
// limits hold in both regions.
SecurityAuditResult audit_decision_security(const NodeDecision& decision, double demand1,
                                            double demand2,
                                            const constraints::SecurityConstraintSet& pack,
                                            double x12, double v1, double v2, double d1,
                                            double d2, const dynamics::SimParams& sim,
                                            dynamics::Backend backend = dynamics::Backend::Auto);

}  // namespace freqsec::scheduler
