#pragma once

// Bridges boundary sample sets into regression problems and trained models.

#include "freqsec/regression/conservative.hpp"
#include "freqsec/sampler/sweep.hpp"

namespace freqsec::regression {

// Builds the per-region training problem. RoCoF models are fitted in the
// cleared-denominator space: the linear combination must overestimate
// (oscillation term) * 2 (H1 + H2), so the fractional constraint stays
// conservative after multiplying through by the positive denominator.
// Nadir-direct models fit the nadir magnitude itself; the integral kinds fit
// the exported frequency-deviation integrals.
RegressionProblem problem_from_samples(const sampler::SampleSet& set, ModelKind kind, int region);

// Solves the conservative fit and attaches region/fault/training-range
// metadata from the sweep.
RegressionModel train_from_samples(const sampler::SampleSet& set, ModelKind kind, int region);

}  // namespace freqsec::regression
