#pragma once

#include <vector>

#include "hallugauge/core.hpp"
#include "hallugauge/provider.hpp"

namespace hg {

// Constants of the scaled/shifted expit mapping pseudo-entropy to (0,1).
struct UncertaintyCalibration {
  double scale = 1.0;
  double shift = 2.302585092994046;  // ln 10
};

// Shannon entropy of the renormalized top-M distribution, in nats.
double ppl5_entropy(const TopTokenDistribution& dist);

// -sum p~_i * ln p_i: unnormalized probability inside the log, so mass
// missing from the top M raises the estimate.
double pseudo_entropy(const TopTokenDistribution& dist);

double sequence_max_pseudo_entropy(const std::vector<TopTokenDistribution>& dists);

// exp(-mean logprob), natural-log convention.
double perplexity(const std::vector<double>& token_logprobs);

double uncertainty_score(double pe, const UncertaintyCalibration& cal);

// Fits scale/shift by logistic regression of labels on pseudo-entropy
// values (Newton iterations). Requires both classes present.
UncertaintyCalibration calibrate_uncertainty(const std::vector<double>& pe_values,
                                             const std::vector<bool>& labels);

}  // namespace hg
