#pragma once

// Benjamini-Hochberg and the calibrated selection step with pruning:
//
//   S  = { j : p_j <= s_j, xi_j R_j <= r* },   s_j = q R_j / m
//   r* = max { r : sum_j 1{p_j <= s_j, xi_j R_j <= r} >= r }
//
// with xi_j iid uniform (hete), one shared uniform (homo) or 1 (dtm).

#include <cstdint>
#include <span>
#include <vector>

#include "optcs/core.hpp"

namespace optcs {

// q r / m. Both BH and the calibrated step use this exact expression so
// thresholds agree bit-for-bit when R_j equals a BH rejection count.
inline double step_threshold(double q, double r, std::size_t m) {
  return q * r / static_cast<double>(m);
}

// max { r : #{p_j <= q r / m} >= r }, 0 if none.
std::size_t bh_rstar(std::span<const double> pvalues, double q);

// { j : p_j <= q r* / m }, ascending 0-based indices.
std::vector<std::size_t> bh(std::span<const double> pvalues, double q);

std::vector<double> draw_xi(PruneMode mode, std::size_t m, std::uint64_t seed);

SelectionOutcome optcs_select(std::span<const double> pvalues, std::span<const double> aux_sizes,
                              double q, PruneMode mode, std::uint64_t seed);

// Same with caller-supplied pruning variables (each in [0, 1]).
SelectionOutcome optcs_select_with_xi(std::span<const double> pvalues,
                                      std::span<const double> aux_sizes, double q,
                                      std::span<const double> xi);

// sum_j 1{p_j <= q R_j / m, j null} / R_j; terms with R_j = 0 contribute 0.
double fdr_decomposition_bound(std::span<const double> pvalues, std::span<const double> aux_sizes,
                               const std::vector<bool>& null_mask, double q);

}  // namespace optcs
