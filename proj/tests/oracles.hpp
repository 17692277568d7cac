#pragma once

// Independent reference implementations used to check the production code.
// Everything here is deliberately naive.

#include <cmath>
#include <utility>
#include <vector>

namespace oracles {

// O(n^2) pairwise AUROC: fraction of (positive, negative) pairs the positive
// outscores, ties at half credit.
inline double pairwise_auroc(const std::vector<std::pair<double, bool>>& pairs) {
  double total = 0;
  long n_pairs = 0;
  for (const auto& [ps, pl] : pairs) {
    if (!pl) continue;
    for (const auto& [ns, nl] : pairs) {
      if (nl) continue;
      ++n_pairs;
      if (ps > ns) total += 1.0;
      else if (ps == ns) total += 0.5;
    }
  }
  return total / n_pairs;
}

// Trapezoidal area under (x, y) points.
inline double trapezoid_area(const std::vector<std::pair<double, double>>& pts) {
  double area = 0;
  for (size_t i = 1; i < pts.size(); ++i)
    area += (pts[i].first - pts[i - 1].first) * (pts[i].second + pts[i - 1].second) / 2.0;
  return area;
}

}  // namespace oracles
