#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hallugauge/core.hpp"

namespace hg {

// Score/label pairs; positive class = hallucinated.
struct ScoredLabels {
  std::vector<std::pair<double, bool>> pairs;
};

struct CurvePoint {
  double threshold = 0.0;
  double x = 0.0;  // fpr or recall
  double y = 0.0;  // tpr or precision
};

struct EvalReport {
  // dataset name -> metric name -> auroc
  std::map<std::string, std::map<std::string, double>> per_dataset;
  // metric name -> mean auroc across its datasets
  std::map<std::string, double> aggregate;
  std::map<std::pair<std::string, std::string>, std::vector<CurvePoint>> roc_curves;
  std::map<std::pair<std::string, std::string>, std::vector<CurvePoint>> pr_curves;
};

// Mann-Whitney AUROC with ties credited 0.5, via rank sums in O(n log n).
double auroc(const ScoredLabels& data);

// Thresholds at each distinct score, descending; (0,0) .. (1,1); trapezoidal
// area equals auroc.
std::vector<CurvePoint> roc_curve(const ScoredLabels& data);

// Thresholds at each distinct score, descending; x = recall, y = precision.
std::vector<CurvePoint> pr_curve(const ScoredLabels& data);

struct RankCorrelations {
  double spearman_rho = 0.0;
  double kendall_tau = 0.0;  // tau-b
};

RankCorrelations rank_correlations(const std::vector<double>& x,
                                   const std::vector<double>& y);

// Per-dataset AUROCs plus the unweighted mean per metric. `expected` maps a
// metric to the datasets it claims; a claimed-but-missing pair is an error.
EvalReport build_report(
    const std::map<std::pair<std::string, std::string>, ScoredLabels>& runs,
    const std::map<std::string, std::vector<std::string>>& expected = {});

// Summary JSON plus one CSV per curve (threshold,fpr,tpr / threshold,recall,precision).
void write_report(const EvalReport& report, const std::string& out_dir);

}  // namespace hg
