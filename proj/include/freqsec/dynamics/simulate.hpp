#pragma once

#include <string>

#include "freqsec/dynamics/types.hpp"

namespace freqsec::dynamics {

// Runs the two-region post-fault simulation and returns the stored trace
// (horizon/dt + 1 grid points).
FrequencyTrace simulate(const OperatingPoint& point, const SimParams& params);

// Extracts trace statistics. The trace must come from `simulate` for the
// same operating point.
TraceStats analyze(const FrequencyTrace& trace, const OperatingPoint& point);

// Damping-free threshold k* such that the centre-of-inertia nadir stays
// within df_max when H * R >= k*, for a linear response ramp completing at
// t_del. Units: MW^2 * s.
double coi_nadir_threshold(double p_loss, double f0, double t_del, double df_max);

// CSV dump, header `t,df1,df2,tie_flow,df_coi`, one row per step.
std::string trace_to_csv(const FrequencyTrace& trace);
void write_trace_csv(const FrequencyTrace& trace, const std::string& path);

}  // namespace freqsec::dynamics
