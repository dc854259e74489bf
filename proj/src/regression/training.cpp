#include "freqsec/regression/training.hpp"

#include <algorithm>
#include <stdexcept>

namespace freqsec::regression {

RegressionProblem problem_from_samples(const sampler::SampleSet& set, ModelKind kind,
                                       int region) {
    if (region != 1 && region != 2)
        throw std::invalid_argument("problem_from_samples: region must be 1 or 2");
    if (kind == ModelKind::Rocof && set.spec.target != sampler::SweepTarget::Rocof)
        throw std::invalid_argument("problem_from_samples: rocof model needs a rocof sweep");
    if (kind == ModelKind::NadirDirect && set.spec.target != sampler::SweepTarget::Nadir)
        throw std::invalid_argument("problem_from_samples: nadir model needs a nadir sweep");

    std::vector<const sampler::Sample*> rows;
    for (const auto& s : set.samples)
        if (s.region == region) rows.push_back(&s);
    for (const auto& s : set.anchor_samples)
        if (s.region == region) rows.push_back(&s);
    if (rows.empty()) throw std::runtime_error("problem_from_samples: no samples for region");

    RegressionProblem prob;
    prob.X = linalg::Mat(rows.size(), 8);
    prob.y.assign(rows.size(), 0.0);
    prob.feature_names = standard_feature_names();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& s = *rows[i];
        for (std::size_t j = 0; j < 8; ++j) prob.X(i, j) = s.features[j];
        switch (kind) {
            case ModelKind::Rocof:
                prob.y[i] = s.label * 2.0 * (s.features[0] + s.features[1]);
                break;
            case ModelKind::NadirDirect: prob.y[i] = s.label; break;
            case ModelKind::NadirDiff: prob.y[i] = s.integral_diff; break;
            case ModelKind::NadirSelf: prob.y[i] = s.integral_self; break;
        }
    }
    return prob;
}

RegressionModel train_from_samples(const sampler::SampleSet& set, ModelKind kind, int region) {
    RegressionModel model = solve_conservative_ls(problem_from_samples(set, kind, region), kind);
    model.region = region;
    model.faulted_region = set.spec.faulted_region;
    const auto [mn, mx] = std::minmax_element(set.spec.p_loss_values.begin(),
                                              set.spec.p_loss_values.end());
    model.p_loss_min = *mn;
    model.p_loss_max = *mx;
    return model;
}

}  // namespace freqsec::regression
