#pragma once

// Bundled GB-2030 style two-region dataset: England (region 1, most of the
// load) and Scotland (region 2, wind-rich), one 400 kV corridor. Default
// sweep grids for training the security rows live here too so the case
// studies run out of the box.

#include <cstdint>
#include <vector>

#include "freqsec/sampler/sweep.hpp"
#include "freqsec/scheduler/fleet.hpp"
#include "freqsec/scheduler/tree.hpp"

namespace freqsec::cli {

struct GbSystem {
    double f0 = 50.0;
    double v1 = 400.0, v2 = 400.0;  // kV
    double x12 = 50.0;              // Ohm
    double corridor_limit = 7500.0; // MW thermal limit
    double rocof_max = 1.0;         // Hz/s
    double df_max = 0.8;            // Hz
    double df_ss_max = 0.5;         // Hz
    double d = 0.005;               // load damping, fraction per Hz
    double demand_share_r1 = 0.9;
    double wind_share_r1 = 0.5;
    double wind_installed = 60000.0;  // MW
    double t_del = 10.0;              // s, full PFR delivery
    double c_ls = 30000.0;            // value of lost load
};

GbSystem gb2030_system();
std::vector<scheduler::GeneratorClass> gb2030_fleet();

// Synthetic hourly traces: demand is a daily sinusoid between 20 and 60 GW
// split 90/10, wind a seeded mean-reverting walk within the installed 60 GW
// split 50/50.
scheduler::HourlyProfile gen_profiles(std::uint64_t seed, int days, const GbSystem& sys);

// Default boundary-sweep grids for a given credible loss. The training grid
// spans demand levels, region splits and (for nadir sweeps) inertia levels
// covering where the scheduler operates; `fresh` shifts every axis for
// held-out evaluation sets.
sampler::SweepSpec gb_sweep_spec(sampler::SweepTarget target, double pack_p_loss,
                                 int faulted_region, const GbSystem& sys, double pd_total,
                                 bool fresh = false);
std::vector<double> gb_sweep_pd_levels(bool fresh = false);

}  // namespace freqsec::cli
