#include "hallugauge/eval.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace hg {

namespace {

void check_classes(const ScoredLabels& data, size_t& n_pos, size_t& n_neg) {
  n_pos = n_neg = 0;
  for (const auto& [score, label] : data.pairs) {
    if (!std::isfinite(score)) throw ValidationError("non-finite score");
    (label ? n_pos : n_neg)++;
  }
  if (n_pos == 0 || n_neg == 0)
    throw ValidationError("AUROC needs at least one positive and one negative");
}

}  // namespace

double auroc(const ScoredLabels& data) {
  size_t n_pos, n_neg;
  check_classes(data, n_pos, n_neg);
  const size_t n = data.pairs.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return data.pairs[a].first < data.pairs[b].first;
  });
  // Average ranks over tie groups (1-based).
  double rank_sum_pos = 0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j < n && data.pairs[order[j]].first == data.pairs[order[i]].first) ++j;
    double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t k = i; k < j; ++k)
      if (data.pairs[order[k]].second) rank_sum_pos += avg_rank;
    i = j;
  }
  double u = rank_sum_pos - static_cast<double>(n_pos) * (n_pos + 1) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

std::vector<CurvePoint> roc_curve(const ScoredLabels& data) {
  size_t n_pos, n_neg;
  check_classes(data, n_pos, n_neg);
  auto sorted = data.pairs;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<CurvePoint> out;
  out.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  size_t tp = 0, fp = 0, i = 0;
  while (i < sorted.size()) {
    size_t j = i;
    while (j < sorted.size() && sorted[j].first == sorted[i].first) {
      (sorted[j].second ? tp : fp)++;
      ++j;
    }
    out.push_back({sorted[i].first, static_cast<double>(fp) / n_neg,
                   static_cast<double>(tp) / n_pos});
    i = j;
  }
  return out;
}

std::vector<CurvePoint> pr_curve(const ScoredLabels& data) {
  size_t n_pos = 0;
  for (const auto& [score, label] : data.pairs) {
    if (!std::isfinite(score)) throw ValidationError("non-finite score");
    if (label) ++n_pos;
  }
  if (data.pairs.empty()) throw ValidationError("empty score list");
  if (n_pos == 0) throw ValidationError("PR curve needs at least one positive");
  auto sorted = data.pairs;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<CurvePoint> out;
  size_t tp = 0, fp = 0, i = 0;
  while (i < sorted.size()) {
    size_t j = i;
    while (j < sorted.size() && sorted[j].first == sorted[i].first) {
      (sorted[j].second ? tp : fp)++;
      ++j;
    }
    out.push_back({sorted[i].first, static_cast<double>(tp) / n_pos,
                   static_cast<double>(tp) / static_cast<double>(tp + fp)});
    i = j;
  }
  return out;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  const size_t n = v.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j < n && v[order[j]] == v[order[i]]) ++j;
    double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const size_t n = a.size();
  double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double num = 0, da = 0, db = 0;
  for (size_t i = 0; i < n; ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    da += (a[i] - ma) * (a[i] - ma);
    db += (b[i] - mb) * (b[i] - mb);
  }
  if (da == 0 || db == 0) throw ValidationError("correlation undefined for constant input");
  return num / std::sqrt(da * db);
}

}  // namespace

RankCorrelations rank_correlations(const std::vector<double>& x,
                                   const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValidationError("length mismatch");
  if (x.size() < 2) throw ValidationError("need at least 2 observations");
  RankCorrelations out;
  out.spearman_rho = pearson(average_ranks(x), average_ranks(y));

  // Kendall tau-b by pair enumeration.
  const size_t n = x.size();
  long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      double dx = x[i] - x[j], dy = y[i] - y[j];
      if (dx == 0 && dy == 0) continue;
      if (dx == 0) { ++ties_x; continue; }
      if (dy == 0) { ++ties_y; continue; }
      if ((dx > 0) == (dy > 0)) ++concordant; else ++discordant;
    }
  }
  double n0 = static_cast<double>(concordant + discordant);
  double denom = std::sqrt((n0 + ties_x) * (n0 + ties_y));
  if (denom == 0) throw ValidationError("correlation undefined for constant input");
  out.kendall_tau = (concordant - discordant) / denom;
  return out;
}

EvalReport build_report(
    const std::map<std::pair<std::string, std::string>, ScoredLabels>& runs,
    const std::map<std::string, std::vector<std::string>>& expected) {
  if (runs.empty()) throw ValidationError("no runs to report");
  for (const auto& [metric, datasets] : expected)
    for (const auto& dataset : datasets)
      if (!runs.count({dataset, metric}))
        throw ValidationError("metric '" + metric + "' missing on dataset '" +
                              dataset + "'");
  EvalReport report;
  std::map<std::string, std::vector<double>> per_metric;
  std::map<std::string, std::vector<std::string>> metric_datasets;
  for (const auto& [key, data] : runs) {
    const auto& [dataset, metric] = key;
    double a;
    try {
      a = auroc(data);
    } catch (const ValidationError& e) {
      throw ValidationError("dataset '" + dataset + "', metric '" + metric +
                            "': " + e.what());
    }
    report.per_dataset[dataset][metric] = a;
    per_metric[metric].push_back(a);
    metric_datasets[metric].push_back(dataset);
    report.roc_curves[key] = roc_curve(data);
    report.pr_curves[key] = pr_curve(data);
  }
  for (const auto& [metric, values] : per_metric)
    report.aggregate[metric] =
        std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  return report;
}

namespace {

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  return out;
}

void write_curve(const std::string& path, const std::vector<CurvePoint>& points,
                 const char* header) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write curve file: " + path);
  out << header << "\n";
  out.precision(17);
  for (const auto& p : points) out << p.threshold << "," << p.x << "," << p.y << "\n";
}

}  // namespace

void write_report(const EvalReport& report, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  nlohmann::json j;
  for (const auto& [dataset, metrics] : report.per_dataset)
    for (const auto& [metric, a] : metrics) j["per_dataset"][dataset][metric] = a;
  for (const auto& [metric, a] : report.aggregate) j["aggregate"][metric] = a;
  std::ofstream out(out_dir + "/summary.json");
  if (!out) throw IoError("cannot write report summary");
  out << j.dump(2) << "\n";

  for (const auto& [key, points] : report.roc_curves)
    write_curve(out_dir + "/roc_" + sanitize(key.first) + "_" + sanitize(key.second) +
                    ".csv",
                points, "threshold,fpr,tpr");
  for (const auto& [key, points] : report.pr_curves)
    write_curve(out_dir + "/pr_" + sanitize(key.first) + "_" + sanitize(key.second) +
                    ".csv",
                points, "threshold,recall,precision");
}

}  // namespace hg
