#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace freqsec::dynamics {

// One post-fault system state of the two-region model. Inertias are
// post-loss values, i.e. the outaged unit has already been removed.
struct OperatingPoint {
    double h1 = 0.0;             // regional inertia, MW*s
    double h2 = 0.0;             // regional inertia, MW*s
    double r1 = 0.0;             // regional PFR capability, MW
    double r2 = 0.0;             // regional PFR capability, MW
    double p_loss = 0.0;         // size of the generation loss, MW
    int faulted_region = 1;      // 1 or 2
    double pd1 = 0.0;            // regional demand, MW
    double pd2 = 0.0;            // regional demand, MW
    double d1 = 0.0;             // load damping, fraction of demand per Hz
    double d2 = 0.0;             // load damping, fraction of demand per Hz
    double v1 = 400.0;           // bus voltage, kV
    double v2 = 400.0;           // bus voltage, kV
    double x12 = 50.0;           // corridor reactance, Ohm
    double f0 = 50.0;            // nominal frequency, Hz

    void validate() const {
        auto fail = [](const std::string& what) {
            throw std::invalid_argument("OperatingPoint: " + what);
        };
        if (!(h1 > 0.0)) fail("h1 must be > 0");
        if (!(h2 > 0.0)) fail("h2 must be > 0");
        if (!(r1 >= 0.0)) fail("r1 must be >= 0");
        if (!(r2 >= 0.0)) fail("r2 must be >= 0");
        if (!(p_loss >= 0.0)) fail("p_loss must be >= 0");
        if (faulted_region != 1 && faulted_region != 2) fail("faulted_region must be 1 or 2");
        if (!(pd1 > 0.0)) fail("pd1 must be > 0");
        if (!(pd2 > 0.0)) fail("pd2 must be > 0");
        if (!(d1 >= 0.0 && d1 <= 0.2)) fail("d1 must be in [0, 0.2]");
        if (!(d2 >= 0.0 && d2 <= 0.2)) fail("d2 must be in [0, 0.2]");
        if (!(x12 > 0.0)) fail("x12 must be > 0");
        if (!(f0 > 0.0)) fail("f0 must be > 0");
    }

    // Synchronizing power coefficient of the corridor, MW (voltages in kV).
    double tie_coefficient_mw() const { return v1 * v2 / x12; }
};

// Fixed-step integration setup. t_del is the time at which the linear PFR
// ramp completes.
struct SimParams {
    double dt = 1e-3;        // s
    double horizon = 30.0;   // s
    double t_del = 10.0;     // s

    void validate() const {
        auto fail = [](const std::string& what) {
            throw std::invalid_argument("SimParams: " + what);
        };
        if (!(dt > 0.0)) fail("dt must be > 0");
        if (!(t_del > 0.0)) fail("t_del must be > 0");
        if (!(horizon >= t_del)) fail("horizon must be >= t_del");
        const double steps = horizon / dt;
        if (std::fabs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
            fail("horizon/dt must be an integer step count");
    }

    std::size_t step_count() const {
        return static_cast<std::size_t>(std::llround(horizon / dt));
    }
};

// Time series of the post-fault frequency deviation in both regions.
struct FrequencyTrace {
    std::vector<double> times;     // s
    std::vector<double> df1;       // Hz, deviation from nominal
    std::vector<double> df2;       // Hz
    std::vector<double> tie_flow;  // MW, positive region 1 -> region 2
    std::vector<double> df_coi;    // Hz, inertia-weighted average

    std::size_t size() const { return times.size(); }
};

// Statistics extracted from one trace.
struct TraceStats {
    double max_rocof_1 = 0.0;    // Hz/s
    double max_rocof_2 = 0.0;    // Hz/s
    double nadir_1 = 0.0;        // Hz, magnitude of most-negative deviation
    double nadir_2 = 0.0;        // Hz
    double t_nadir_1 = 0.0;      // s
    double t_nadir_2 = 0.0;      // s
    double coi_rocof_0 = 0.0;    // Hz/s, signed initial COI slope
    double osc_label_1 = 0.0;    // Hz/s, max_rocof_1 minus the COI term
    double osc_label_2 = 0.0;    // Hz/s
    double integral_diff = 0.0;  // Hz*s^2, double integral of df1-df2 up to t_nadir
    double integral_self_1 = 0.0;  // Hz*s, integral of df1 up to t_nadir
    double integral_self_2 = 0.0;  // Hz*s
};

class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace freqsec::dynamics
