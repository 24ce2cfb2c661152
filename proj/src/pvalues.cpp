#include "optcs/pvalues.hpp"

#include <algorithm>

namespace optcs {

double conformal_pvalue(std::span<const double> cal_scores, double test_score) {
  if (cal_scores.empty()) throw Error("empty calibration scores");
  const auto le = std::count_if(cal_scores.begin(), cal_scores.end(),
                                [&](double v) { return v <= test_score; });
  return static_cast<double>(1 + le) / static_cast<double>(cal_scores.size() + 1);
}

double conformal_pvalue_randomized(std::span<const double> cal_scores, double test_score, double u) {
  if (cal_scores.empty()) throw Error("empty calibration scores");
  if (!(u >= 0.0 && u <= 1.0)) throw Error("tie-breaking variable u must lie in [0, 1]");
  std::size_t less = 0, equal = 0;
  for (double v : cal_scores) {
    if (v < test_score) {
      ++less;
    } else if (v == test_score) {
      ++equal;
    }
  }
  return (static_cast<double>(less) + u * static_cast<double>(1 + equal)) /
         static_cast<double>(cal_scores.size() + 1);
}

std::vector<double> pvalues_from_matrix(const ScoreMatrix& scores) {
  std::vector<double> p(scores.rows());
  for (std::size_t j = 0; j < scores.rows(); ++j) {
    p[j] = conformal_pvalue(scores.calibration(j), scores.tests(j)[j]);
  }
  return p;
}

std::vector<double> modified_pvalues_for_j(std::span<const double> cal_scores,
                                           std::span<const double> test_scores, std::size_t j) {
  if (j >= test_scores.size()) throw Error("test index out of range");
  const double denom = static_cast<double>(cal_scores.size() + 1);
  const double anchor = test_scores[j];
  std::vector<double> out;
  out.reserve(test_scores.size() - 1);
  for (std::size_t l = 0; l < test_scores.size(); ++l) {
    if (l == j) continue;
    const double t = test_scores[l];
    const auto le = std::count_if(cal_scores.begin(), cal_scores.end(),
                                  [&](double v) { return v <= t; });
    out.push_back(static_cast<double>(le + (anchor <= t ? 1 : 0)) / denom);
  }
  return out;
}

CalibrationRanks::CalibrationRanks(std::span<const double> cal_scores)
    : sorted_(cal_scores.begin(), cal_scores.end()) {
  std::sort(sorted_.begin(), sorted_.end());
}

std::size_t CalibrationRanks::count_le(double t) const {
  return static_cast<std::size_t>(std::upper_bound(sorted_.begin(), sorted_.end(), t) -
                                  sorted_.begin());
}

}  // namespace optcs
