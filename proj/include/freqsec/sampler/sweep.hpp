#pragma once

// Boundary sampling: sweep feasible operating conditions, drive each grid
// point to the regional RoCoF (or nadir) security boundary by repeated
// simulation, and emit labeled samples for the conservative regression.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "freqsec/dynamics/batch.hpp"
#include "freqsec/dynamics/types.hpp"

namespace freqsec::sampler {

enum class SweepTarget { Rocof, Nadir };

const char* target_name(SweepTarget t);
SweepTarget target_from_name(const std::string& name);

struct SweepSpec {
    SweepTarget target = SweepTarget::Rocof;
    std::vector<double> p_loss_values;  // MW
    int faulted_region = 1;
    std::vector<double> d_splits;  // region-1 share of the damping-demand product
    std::vector<double> r_splits;  // region-1 share of total PFR
    std::vector<double> h_splits;  // region-1 share of total inertia
    // Inertia levels explored on top of the RoCoF-floor total; nadir sweeps
    // use several so the sampled inertia range covers realistic systems.
    std::vector<double> h_total_factors{1.0};
    // Response levels relative to the COI-nadir threshold value. RoCoF sweeps
    // vary these so the response coefficients are identified independently of
    // loss size and inertia; the quasi-steady-state floor still applies.
    std::vector<double> r_total_factors{1.0};
    double pd_total = 0.0;    // MW
    double d_total = 0.0;     // fraction of demand per Hz
    double rocof_max = 1.0;   // Hz/s
    double df_max = 0.8;      // Hz
    double df_ss_max = 0.5;   // Hz
    double boundary_tol = 5e-3;    // Hz/s for rocof target, Hz for nadir
    double walk_increment = 0.0;   // MW*s per step (rocof) or MW (nadir)
    // System constants used to materialize operating points.
    double f0 = 50.0;
    double v1 = 400.0;   // kV
    double v2 = 400.0;   // kV
    double x12 = 50.0;   // Ohm
    double t_del = 10.0; // s, must match the SimParams used for the sweep
    // Near-boundary anchor stencil: each successful boundary point is also
    // simulated at these (inertia scale, response scale) offsets and the
    // labeled results are kept as separate anchor samples. Training on the
    // boundary alone leaves the fitted slopes unidentified along the
    // boundary manifold; anchors on both sides pin them down.
    std::vector<std::array<double, 2>> anchor_scales;

    void validate() const;
    std::size_t grid_size() const;
};

struct GridChoice {
    double d_split = 0.5;
    double r_split = 0.5;
    double h_split = 0.5;
    double h_factor = 1.0;
    double r_factor = 1.0;
};

struct Sample {
    std::array<double, 8> features{};  // h1, h2, p_loss, d1*pd1, d2*pd2, r1, r2, 1
    double label = 0.0;                // Hz/s for rocof target, Hz for nadir
    int region = 1;
    double integral_diff = 0.0;        // Hz*s^2
    double integral_self = 0.0;        // Hz*s, own region
    dynamics::OperatingPoint point;    // boundary point the sample came from
};

struct SweepFailure {
    std::size_t grid_index = 0;
    std::string description;
    std::string message;
};

struct SampleSet {
    std::vector<Sample> samples;          // on the boundary (within boundary_tol)
    std::vector<Sample> anchor_samples;   // near-boundary perturbations
    SweepSpec spec;
    dynamics::SimParams params;
    std::vector<SweepFailure> failures;
};

// Starting point of the boundary walk for one grid choice: total inertia at
// the COI RoCoF floor (times the grid's inertia factor), total response from
// the COI nadir threshold, raised to the quasi-steady-state floor if needed.
dynamics::OperatingPoint initial_point(double p_loss, const SweepSpec& spec,
                                       const GridChoice& choice);
dynamics::OperatingPoint initial_point(double p_loss, const SweepSpec& spec);

struct WalkResult {
    dynamics::OperatingPoint point;
    dynamics::TraceStats stats;
    std::vector<double> metric_history;  // binding metric per evaluation
    int evaluations = 0;
};

// Drives the point to the boundary of the target limit: coarse fixed
// increments on the walked total (inertia for rocof, response for nadir)
// followed by a bisection refinement to within boundary_tol. Throws
// std::runtime_error when the boundary cannot be reached.
WalkResult walk_to_boundary(const dynamics::OperatingPoint& point, const SweepSpec& spec,
                            const dynamics::SimParams& params,
                            dynamics::Backend backend = dynamics::Backend::Auto);

// Full sweep over the grid; failed grid points are recorded, not fatal.
// Deterministic for a fixed spec, params and resolved backend.
SampleSet run_sweep(const SweepSpec& spec, const dynamics::SimParams& params,
                    dynamics::Backend backend = dynamics::Backend::Auto);

// Serialization. The samples CSV uses the fixed header
// `region,h1,h2,p_loss,dpd1,dpd2,r1,r2,label`; the sidecar JSON records the
// spec, sim params and failure list; the integrals CSV carries the
// frequency-deviation integrals for the integral-template regressions.
std::string samples_to_csv(const SampleSet& set);
std::string integrals_to_csv(const SampleSet& set);
std::string sidecar_to_json(const SampleSet& set);
void write_sample_set(const SampleSet& set, const std::string& csv_path,
                      const std::string& sidecar_path, const std::string& integrals_path = "",
                      const std::string& anchors_path = "");
SampleSet read_sample_set(const std::string& csv_path, const std::string& sidecar_path,
                          const std::string& anchors_path = "");

struct AuditReport {
    bool all_within = true;
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst_low = 0.0;   // largest shortfall below limit - tol
    double worst_high = 0.0;  // largest excess above limit
};

// Re-simulates every sample's operating point and checks the binding metric
// lies in [limit - boundary_tol, limit].
AuditReport audit_boundary_membership(const SampleSet& set, const dynamics::SimParams& params,
                                      dynamics::Backend backend = dynamics::Backend::Auto);

}  // namespace freqsec::sampler
