#pragma once

// Conformal p-values from score matrices, plus the modified p-values used
// to evaluate candidate models for one test point at a time.

#include <span>
#include <vector>

#include "optcs/core.hpp"

namespace optcs {

// (1 + #{cal <= test}) / (n2 + 1)
double conformal_pvalue(std::span<const double> cal_scores, double test_score);

// (#{cal < test} + u (1 + #{cal == test})) / (n2 + 1), u in [0, 1]
double conformal_pvalue_randomized(std::span<const double> cal_scores, double test_score, double u);

// p_j from row j: calibration entries against the entry at n2 + j.
std::vector<double> pvalues_from_matrix(const ScoreMatrix& scores);

// For l != j (0-based), in increasing l:
//   (#{cal <= test[l]} + 1{test[j] <= test[l]}) / (n2 + 1)
std::vector<double> modified_pvalues_for_j(std::span<const double> cal_scores,
                                           std::span<const double> test_scores, std::size_t j);

// Sorted calibration scores answering #{cal <= t} in O(log n2).
class CalibrationRanks {
 public:
  explicit CalibrationRanks(std::span<const double> cal_scores);
  std::size_t count_le(double t) const;
  std::size_t size() const { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

}  // namespace optcs
