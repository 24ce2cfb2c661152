#include "optcs/mtest.hpp"

#include <algorithm>
#include <cmath>

#include "optcs/rng.hpp"

namespace optcs {

std::size_t bh_rstar(std::span<const double> pvalues, double q) {
  check_level(q);
  const std::size_t m = pvalues.size();
  std::vector<double> sorted(pvalues.begin(), pvalues.end());
  std::sort(sorted.begin(), sorted.end());
  // #{p <= t_r} >= r  <=>  p_(r) <= t_r
  for (std::size_t r = m; r >= 1; --r) {
    if (sorted[r - 1] <= step_threshold(q, static_cast<double>(r), m)) return r;
  }
  return 0;
}

std::vector<std::size_t> bh(std::span<const double> pvalues, double q) {
  const std::size_t r = bh_rstar(pvalues, q);
  std::vector<std::size_t> out;
  if (r == 0) return out;
  const double t = step_threshold(q, static_cast<double>(r), pvalues.size());
  for (std::size_t j = 0; j < pvalues.size(); ++j) {
    if (pvalues[j] <= t) out.push_back(j);
  }
  return out;
}

std::vector<double> draw_xi(PruneMode mode, std::size_t m, std::uint64_t seed) {
  std::vector<double> xi(m, 1.0);
  Rng rng = substream(seed, "prune_xi");
  switch (mode) {
    case PruneMode::hete:
      for (auto& v : xi) v = uniform01(rng);
      break;
    case PruneMode::homo:
      std::fill(xi.begin(), xi.end(), uniform01(rng));
      break;
    case PruneMode::dtm:
      break;
  }
  return xi;
}

SelectionOutcome optcs_select(std::span<const double> pvalues, std::span<const double> aux_sizes,
                              double q, PruneMode mode, std::uint64_t seed) {
  const auto xi = draw_xi(mode, pvalues.size(), seed);
  return optcs_select_with_xi(pvalues, aux_sizes, q, xi);
}

SelectionOutcome optcs_select_with_xi(std::span<const double> pvalues,
                                      std::span<const double> aux_sizes, double q,
                                      std::span<const double> xi) {
  check_level(q);
  const std::size_t m = pvalues.size();
  if (aux_sizes.size() != m || xi.size() != m) {
    throw Error("p-values, auxiliary sizes and pruning variables must have equal length");
  }
  for (double r : aux_sizes) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw Error("auxiliary sizes must be finite and >= 0");
  }

  std::vector<bool> pass(m);
  std::vector<double> pruned;
  for (std::size_t j = 0; j < m; ++j) {
    pass[j] = pvalues[j] <= step_threshold(q, aux_sizes[j], m);
    if (pass[j]) pruned.push_back(xi[j] * aux_sizes[j]);
  }
  std::sort(pruned.begin(), pruned.end());

  std::size_t r_star = 0;
  for (std::size_t r = m; r >= 1; --r) {
    const auto count = static_cast<std::size_t>(
        std::upper_bound(pruned.begin(), pruned.end(), static_cast<double>(r)) - pruned.begin());
    if (count >= r) {
      r_star = r;
      break;
    }
  }

  SelectionOutcome out;
  out.pvalues.assign(pvalues.begin(), pvalues.end());
  out.aux_sizes.assign(aux_sizes.begin(), aux_sizes.end());
  out.xi.assign(xi.begin(), xi.end());
  out.r_star = r_star;
  for (std::size_t j = 0; j < m; ++j) {
    if (pass[j] && xi[j] * aux_sizes[j] <= static_cast<double>(r_star)) out.selected.push_back(j);
  }
  return out;
}

double fdr_decomposition_bound(std::span<const double> pvalues, std::span<const double> aux_sizes,
                               const std::vector<bool>& null_mask, double q) {
  const std::size_t m = pvalues.size();
  if (aux_sizes.size() != m || null_mask.size() != m) throw Error("length mismatch");
  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    if (!null_mask[j] || aux_sizes[j] <= 0.0) continue;
    if (pvalues[j] <= step_threshold(q, aux_sizes[j], m)) total += 1.0 / aux_sizes[j];
  }
  return total;
}

}  // namespace optcs
