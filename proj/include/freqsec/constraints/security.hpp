#pragma once

// Assembles trained regression models and fixed parameters into the linear
// security rows enforced per scheduling period: regional RoCoF, regional
// nadir, COI RoCoF floor and the quasi-steady-state response requirement.
// Rows are linear in the scheduler decisions (H1, H2, R1, R2); demand terms
// are folded into the right-hand side per period.

#include <span>
#include <string>
#include <vector>

#include "freqsec/regression/conservative.hpp"

namespace freqsec::constraints {

struct SecurityParams {
    double rocof_max = 1.0;   // Hz/s
    double df_max = 0.8;      // Hz
    double df_ss_max = 0.5;   // Hz
    double f0 = 50.0;         // Hz
    double p_loss = 0.0;      // MW
    int faulted_region = 1;
    double h_loss = 0.0;      // MW*s, inertia of the outaged unit (0 for infeed losses)

    void validate() const;
};

// sense is always >=: coeff_h1*H1 + coeff_h2*H2 + coeff_r1*R1 + coeff_r2*R2 >= rhs
struct ConstraintRow {
    std::string name;
    double coeff_h1 = 0.0;  // per MW*s
    double coeff_h2 = 0.0;
    double coeff_r1 = 0.0;  // per MW
    double coeff_r2 = 0.0;
    double rhs = 0.0;

    double lhs(double h1, double h2, double r1, double r2) const {
        return coeff_h1 * h1 + coeff_h2 * h2 + coeff_r1 * r1 + coeff_r2 * r2;
    }
    bool satisfied(double h1, double h2, double r1, double r2, double tol = 1e-9) const {
        return lhs(h1, h2, r1, r2) >= rhs - tol;
    }
};

struct ModelRef {
    std::string id;
    std::string hash;
};

struct SecurityConstraintSet {
    std::vector<ConstraintRow> rows;  // materialized at the reference demand terms
    SecurityParams params;
    double dpd1_ref = 0.0;  // MW/Hz, reference damping-demand products
    double dpd2_ref = 0.0;
    std::vector<regression::RegressionModel> models;  // rocof r1/r2, nadir r1/r2
    std::vector<ModelRef> models_used;
    std::vector<std::string> warnings;

    // Re-materializes the six rows for a period's damping-demand products.
    std::vector<ConstraintRow> rows_for_demand(double dpd1, double dpd2) const;
    const regression::RegressionModel& model(regression::ModelKind kind, int region) const;
};

// Regional RoCoF row: the fractional form is multiplied through by the
// positive denominator 2 (H1 + H2) before rearranging to >= sense.
ConstraintRow rocof_row(const regression::RegressionModel& model, const SecurityParams& params,
                        double dpd1, double dpd2, int region);

// Regional nadir row from a directly-trained conservative overestimate.
ConstraintRow nadir_row(const regression::RegressionModel& model, const SecurityParams& params,
                        double dpd1, double dpd2, int region);

// Quasi-steady-state requirement: R1 + R2 >= p_loss - dpd_total * df_ss_max.
ConstraintRow qss_row(const SecurityParams& params, double dpd_total);

// COI RoCoF safety floor: H1 + H2 >= f0 * p_loss / (2 * rocof_max).
ConstraintRow coi_rocof_row(const SecurityParams& params);

// Builds the six-row set. Requires one rocof and one nadir_direct model per
// region, all trained for params.faulted_region.
SecurityConstraintSet build(const std::vector<regression::RegressionModel>& models,
                            const SecurityParams& params, double dpd1, double dpd2);

// Predicted regional RoCoF and nadir for an 8-feature operating point
// (h1, h2, p_loss, dpd1, dpd2, r1, r2, 1); used by the conservativeness
// audits.
double predicted_regional_rocof(const regression::RegressionModel& model,
                                std::span<const double> features, double f0);
double predicted_regional_nadir(const regression::RegressionModel& model,
                                std::span<const double> features);

std::string pack_to_json(const SecurityConstraintSet& pack);
SecurityConstraintSet pack_from_json_text(const std::string& text);
void write_pack(const SecurityConstraintSet& pack, const std::string& path);
SecurityConstraintSet read_pack(const std::string& path);

}  // namespace freqsec::constraints
