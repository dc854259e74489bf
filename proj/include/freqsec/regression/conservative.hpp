#pragma once

// Conservative linear regression: minimize 1/2 ||X theta - y||^2 subject to
// X theta >= y, so the fitted surface lies above every training label. The
// scheduler-facing constraint soundness rests on that feasibility being
// essentially exact (1e-9).

#include <span>
#include <string>
#include <vector>

#include "freqsec/util/linalg.hpp"

namespace freqsec::regression {

enum class ModelKind { Rocof, NadirDiff, NadirSelf, NadirDirect };

const char* kind_name(ModelKind k);
ModelKind kind_from_name(const std::string& name);

struct TrainingStats {
    double mean_overestimation = 0.0;
    double max_overestimation = 0.0;
    double min_overestimation = 0.0;
};

struct RegressionProblem {
    linalg::Mat X;  // n x p feature matrix
    linalg::Vec y;  // n labels
    std::vector<std::string> feature_names;

    void validate() const;
};

struct RegressionModel {
    linalg::Vec theta;
    ModelKind kind = ModelKind::Rocof;
    TrainingStats training_stats;
    std::vector<std::string> feature_names;
    int region = 0;          // 1 or 2; 0 when not applicable
    int faulted_region = 0;  // fault configuration the model was trained for
    double p_loss_min = 0.0;
    double p_loss_max = 0.0;
    bool rank_deficient = false;
    std::vector<std::string> warnings;
};

// Default feature layout shared by all trained models.
std::vector<std::string> standard_feature_names();

// Solves the inequality-constrained least squares by a primal active-set
// method on the (column-equilibrated) normal equations. Feasibility is
// enforced to 1e-9, stationarity to 1e-8. Rank-deficient active sets fall
// back to a tiny ridge (minimum-norm tie-break) and set rank_deficient.
RegressionModel solve_conservative_ls(const RegressionProblem& prob,
                                      ModelKind kind = ModelKind::Rocof);

double predict(const RegressionModel& model, std::span<const double> features);

// FNV-1a hash over the canonical serialized coefficients; used to pin which
// models a constraint pack was built from.
std::string model_hash(const RegressionModel& model);

std::string model_to_json(const RegressionModel& model);
RegressionModel model_from_json_text(const std::string& text);
void write_model(const RegressionModel& model, const std::string& path);
RegressionModel read_model(const std::string& path);

}  // namespace freqsec::regression
