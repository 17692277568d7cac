#include "hallugauge/probmetrics.hpp"

#include <algorithm>
#include <cmath>

namespace hg {

namespace {

double observed_mass(const TopTokenDistribution& dist) {
  dist.validate();
  double sum = 0;
  for (const auto& [tok, p] : dist.observed) sum += p;
  // Float slack can push the sum marginally above 1.
  return std::min(sum, 1.0);
}

}  // namespace

double ppl5_entropy(const TopTokenDistribution& dist) {
  double sum = observed_mass(dist);
  double h = 0;
  for (const auto& [tok, p] : dist.observed) {
    double pn = p / sum;
    h -= pn * std::log(pn);
  }
  return std::max(h, 0.0);
}

double pseudo_entropy(const TopTokenDistribution& dist) {
  double sum = observed_mass(dist);
  double h = 0;
  for (const auto& [tok, p] : dist.observed) h -= (p / sum) * std::log(p);
  return std::max(h, 0.0);
}

double sequence_max_pseudo_entropy(const std::vector<TopTokenDistribution>& dists) {
  if (dists.empty()) throw ValidationError("no token distributions");
  double best = -1;
  for (const auto& d : dists) best = std::max(best, pseudo_entropy(d));
  return best;
}

double perplexity(const std::vector<double>& token_logprobs) {
  if (token_logprobs.empty()) throw ValidationError("no token logprobs");
  double sum = 0;
  for (double lp : token_logprobs) {
    if (!std::isfinite(lp)) throw ValidationError("non-finite token logprob");
    sum += lp;
  }
  return std::exp(-sum / static_cast<double>(token_logprobs.size()));
}

double uncertainty_score(double pe, const UncertaintyCalibration& cal) {
  if (cal.scale <= 0) throw ValidationError("calibration scale must be positive");
  return 1.0 / (1.0 + std::exp(-cal.scale * (pe - cal.shift)));
}

UncertaintyCalibration calibrate_uncertainty(const std::vector<double>& pe_values,
                                             const std::vector<bool>& labels) {
  if (pe_values.size() != labels.size() || pe_values.size() < 2)
    throw ValidationError("calibration needs matching value/label lists, n >= 2");
  bool any_pos = false, any_neg = false;
  for (bool l : labels) (l ? any_pos : any_neg) = true;
  if (!any_pos || !any_neg)
    throw ValidationError("calibration needs both classes present");

  // Logistic regression sigma(w*x + b) by Newton's method with a small ridge
  // term so separable data stays finite.
  double w = 1.0, b = 0.0;
  const double ridge = 1e-6;
  const size_t n = pe_values.size();
  for (int iter = 0; iter < 100; ++iter) {
    double gw = ridge * w, gb = 0;
    double hww = ridge, hwb = 0, hbb = ridge;
    for (size_t i = 0; i < n; ++i) {
      double x = pe_values[i];
      double mu = 1.0 / (1.0 + std::exp(-(w * x + b)));
      double r = mu - (labels[i] ? 1.0 : 0.0);
      double s = mu * (1.0 - mu);
      gw += r * x;
      gb += r;
      hww += s * x * x;
      hwb += s * x;
      hbb += s;
    }
    double det = hww * hbb - hwb * hwb;
    if (std::abs(det) < 1e-12) break;
    double dw = (hbb * gw - hwb * gb) / det;
    double db = (hww * gb - hwb * gw) / det;
    w -= dw;
    b -= db;
    if (std::abs(dw) < 1e-10 && std::abs(db) < 1e-10) break;
  }
  if (w <= 0)
    throw ValidationError(
        "fitted slope is not positive; pseudo-entropy does not separate these labels "
        "in the expected direction");
  return {w, -b / w};
}

}  // namespace hg
