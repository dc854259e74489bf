#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "freqsec/cli/gb2030.hpp"
#include "freqsec/constraints/security.hpp"
#include "freqsec/dynamics/batch.hpp"
#include "freqsec/regression/training.hpp"
#include "freqsec/sampler/sweep.hpp"
#include "freqsec/scheduler/rolling.hpp"

namespace freqsec::cli {

struct CommandContext {
    std::string out_dir = ".";
    std::uint64_t seed = 42;
    bool verify = false;
    dynamics::Backend backend = dynamics::Backend::Auto;
};

// Raised when a --verify audit finds a violation; maps to exit code 3.
class AuditFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void cmd_simulate(const nlohmann::json& config, const CommandContext& ctx);
void cmd_sweep(const nlohmann::json& config, const CommandContext& ctx);
void cmd_fit(const nlohmann::json& config, const CommandContext& ctx);
void cmd_pack(const nlohmann::json& config, const CommandContext& ctx);
void cmd_schedule(const nlohmann::json& config, const CommandContext& ctx);
void cmd_gen_profiles(int days, const std::string& out_file, const CommandContext& ctx);
void cmd_casestudy(const nlohmann::json& config, const CommandContext& ctx);

// Shared pipeline helpers (also used by the case studies and tests).

sampler::SampleSet merge_sample_sets(std::vector<sampler::SampleSet> sets);

sampler::SweepSpec sweep_spec_from_json(const nlohmann::json& j);
dynamics::SimParams sim_params_from_json(const nlohmann::json& j);
dynamics::OperatingPoint operating_point_from_json(const nlohmann::json& j);

struct TrainedPack {
    constraints::SecurityConstraintSet pack;
    std::size_t rocof_samples = 0;
    std::size_t nadir_samples = 0;
    std::size_t failures = 0;
};

// Trains the four models for one credible loss over the bundled sweep grids
// and assembles the constraint pack.
TrainedPack train_gb_pack(double p_loss, int faulted_region, double h_loss, const GbSystem& sys,
                          const dynamics::SimParams& sim,
                          dynamics::Backend backend = dynamics::Backend::Auto);

struct PackAuditReport {
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst_rocof_excess = 0.0;  // Hz/s above the limit
    double worst_nadir_excess = 0.0;  // Hz above the limit
};

// Samples points on and inside the pack's feasible boundary and re-simulates
// each one; sound rows never certify an insecure point.
PackAuditReport audit_pack_soundness(const constraints::SecurityConstraintSet& pack,
                                     const GbSystem& sys, const dynamics::SimParams& sim,
                                     dynamics::Backend backend = dynamics::Backend::Auto);

struct ScheduleRunConfig {
    std::vector<scheduler::GeneratorClass> classes;
    scheduler::HourlyProfile profile;
    std::size_t start_hour = 0;
    std::size_t hours = 24;
    scheduler::TreeConfig tree;
    scheduler::SucOptions options;
    GbSystem sys;
};

struct ScheduleRunResult {
    std::vector<scheduler::HourlyRecord> records;
    scheduler::RunSummary summary;
};

ScheduleRunResult run_schedule(const ScheduleRunConfig& cfg,
                               const constraints::SecurityConstraintSet* pack);

// Security audit of every hourly root decision; returns failure messages.
std::vector<std::string> security_audit_records(
    const std::vector<scheduler::HourlyRecord>& records,
    const constraints::SecurityConstraintSet& pack, const GbSystem& sys,
    const scheduler::SucOptions& options, const dynamics::SimParams& sim,
    dynamics::Backend backend = dynamics::Backend::Auto);

}  // namespace freqsec::cli
