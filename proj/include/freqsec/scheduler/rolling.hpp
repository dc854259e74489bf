#pragma once

// Rolling-horizon driver: every hour a fresh lookahead tree is built and
// solved, only the root decision is kept, and the commitment state (timers
// and start-up pipeline) advances into the next build.

#include <string>
#include <vector>

#include "freqsec/scheduler/suc.hpp"

namespace freqsec::scheduler {

struct HourlyRecord {
    std::size_t hour = 0;
    NodeDecision root;
    double demand[2] = {0.0, 0.0};
    double wind_avail[2] = {0.0, 0.0};
    double objective = 0.0;  // lookahead objective, for diagnostics
    milp::Status status = milp::Status::Infeasible;
    double gap = 0.0;
    long mip_nodes = 0;
};

// A commitment that covers the first hour's net demand plus a reserve
// margin, so a cold start does not shed load while the pipeline fills.
RollingState warm_start_state(const std::vector<GeneratorClass>& classes,
                              const HourlyProfile& profile, std::size_t hour0,
                              double reserve_mw = 2000.0);

// Initial commitment positioned for the first hour's needs including any
// frequency rows: solves the single first hour with start-up restrictions
// relaxed and adopts its commitment as the day's starting state.
RollingState warm_start_state(const std::vector<GeneratorClass>& classes,
                              const HourlyProfile& profile, std::size_t hour0,
                              const constraints::SecurityConstraintSet* pack,
                              const SucOptions& options);

std::vector<HourlyRecord> rolling_horizon(const std::vector<GeneratorClass>& classes,
                                          const HourlyProfile& profile, std::size_t hour0,
                                          std::size_t hours, const TreeConfig& tree_config,
                                          const constraints::SecurityConstraintSet* pack,
                                          const SucOptions& options, RollingState state);

struct RunSummary {
    double avg_h1 = 0.0, avg_h2 = 0.0;  // MW*s, post-loss decision quantities
    double avg_h1_procured = 0.0, avg_h2_procured = 0.0;
    double avg_r1 = 0.0, avg_r2 = 0.0;  // MW
    double curtailment_1 = 0.0, curtailment_2 = 0.0;  // MWh over the run
    double energy_served = 0.0;                       // MWh
    double load_shed = 0.0;                           // MWh
    double thermal_energy = 0.0;                      // MWh
    double carbon_intensity_dispatch = 0.0;  // gCO2/kWh over thermal energy
    double carbon_intensity_system = 0.0;    // gCO2/kWh over energy served
    double cost_total = 0.0, cost_startup = 0.0, cost_noload = 0.0, cost_marginal = 0.0;
    double cost_loadshed = 0.0, cost_penalty = 0.0;
};

RunSummary report(const std::vector<HourlyRecord>& records,
                  const std::vector<GeneratorClass>& classes);

std::string summary_to_json(const RunSummary& summary);
std::string decisions_to_csv(const std::vector<HourlyRecord>& records,
                             const std::vector<GeneratorClass>& classes);

}  // namespace freqsec::scheduler
