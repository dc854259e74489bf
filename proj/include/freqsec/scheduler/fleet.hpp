#pragma once

#include <limits>
#include <string>
#include <vector>

namespace freqsec::scheduler {

// One clustered class of identical thermal units.
struct GeneratorClass {
    std::string name;
    int region = 1;
    int count = 1;
    double p_max = 0.0;   // MW per unit
    double p_msg = 0.0;   // MW per unit, minimum stable generation
    double c_nl = 0.0;    // no-load cost, per hour online
    double c_m = 0.0;     // marginal cost, per MWh
    double c_st = 0.0;    // start-up cost, per start
    int start_up_time = 0;  // hours; ignored for must-run classes
    int min_up = 0;         // hours
    int min_down = 0;       // hours
    double h_const = 0.0;   // inertia constant, s
    double r_max = 0.0;     // PFR capacity per unit, MW
    double r_slope = 0.0;   // share of headroom deliverable as PFR
    double emissions = 0.0; // gCO2 per kWh
    bool must_run = false;  // committed at full count, cannot start or stop
    double ramp_per_hour = std::numeric_limits<double>::infinity();  // MW/h per unit

    void validate() const;
    double unit_inertia() const { return h_const * p_max; }  // MW*s per unit
};

void validate_fleet(const std::vector<GeneratorClass>& classes);

// CSV with header:
// name,region,count,p_max_mw,p_msg_mw,no_load_cost,marginal_cost,startup_cost,
// startup_time_h,min_up_h,min_down_h,inertia_const_s,pfr_max_mw,pfr_slope,emissions_g_per_kwh
// startup_time_h of "na" marks a must-run class. '#' lines are comments.
std::vector<GeneratorClass> read_fleet_csv(const std::string& path);
std::string fleet_to_csv(const std::vector<GeneratorClass>& classes);

}  // namespace freqsec::scheduler
