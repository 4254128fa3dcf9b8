#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace woodleaf::testing {

/// Exhaustive misclassification-minimising intensity cut. Candidate cuts sit
/// midway between consecutive distinct sorted sample values, so the result
/// does not depend on which side a value equal to the cut falls.
inline double exhaustive_best_cut(const std::vector<double>& wood, const std::vector<double>& leaf) {
  std::vector<double> values(wood);
  values.insert(values.end(), leaf.begin(), leaf.end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.size() < 2) return values.empty() ? 0.0 : values.front();
  double best = values.front();
  std::size_t best_err = SIZE_MAX;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double t = 0.5 * (values[i] + values[i + 1]);
    std::size_t err = 0;
    for (double w : wood) err += w < t;
    for (double l : leaf) err += l >= t;
    if (err < best_err) best_err = err, best = t;
  }
  return best;
}

}  // namespace woodleaf::testing
