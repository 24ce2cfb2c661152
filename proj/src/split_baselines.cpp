#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "optcs/mtest.hpp"
#include "optcs/procedures.hpp"
#include "optcs/pvalues.hpp"
#include "optcs/rng.hpp"

namespace optcs {

namespace {

std::vector<LabeledSample> gather(std::span<const LabeledSample> data,
                                  const std::vector<std::size_t>& idx) {
  std::vector<LabeledSample> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(data[i]);
  return out;
}

std::vector<ScoreFunction> fit_all(std::span<const CandidateSpec> candidates,
                                   std::span<const LabeledSample> train_data) {
  std::vector<ScoreFunction> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) out.emplace_back(c.score, train(c.trainer, train_data));
  return out;
}

// SCS selection size with `held_out` playing the test role at its own
// thresholds; labels of held_out are not used.
std::size_t held_out_size(const ScoreFunction& fn, std::span<const LabeledSample> cal,
                          std::span<const LabeledSample> held_out, double q) {
  std::vector<double> cal_scores;
  cal_scores.reserve(cal.size());
  for (const auto& s : cal) cal_scores.push_back(fn(s.x, s.y, s.c));
  const CalibrationRanks ranks(cal_scores);
  const double denom = static_cast<double>(cal.size() + 1);
  std::vector<double> p;
  p.reserve(held_out.size());
  for (const auto& s : held_out) {
    p.push_back(static_cast<double>(1 + ranks.count_le(fn(s.x, s.c, s.c))) / denom);
  }
  return bh_rstar(p, q);
}

std::size_t pick_largest(const std::vector<ScoreFunction>& fns,
                         std::span<const LabeledSample> cal_sel,
                         std::span<const LabeledSample> test_sel, double q) {
  std::size_t best = 0;
  std::size_t best_size = 0;
  for (std::size_t k = 0; k < fns.size(); ++k) {
    const std::size_t size = held_out_size(fns[k], cal_sel, test_sel, q);
    if (k == 0 || size > best_size) {
      best = k;
      best_size = size;
    }
  }
  return best;
}

Problem with_calibration(const Problem& problem, std::vector<LabeledSample> cal) {
  const std::size_t n2 = cal.size();
  std::vector<TestSample> test(problem.test().begin(), problem.test().end());
  return validate_problem(std::move(cal), std::move(test), {0, n2, problem.split().m});
}

SelectionOutcome final_scs(const Problem& reduced, const ScoreFunction& fn, std::size_t k,
                           double q) {
  auto out = run_scs(reduced, fn, q);
  out.selected_models = std::vector<std::size_t>(reduced.split().m, k);
  return out;
}

std::vector<double> default_ratios(const SplitBaselineSpec& spec) {
  if (!spec.ratios.empty()) return spec.ratios;
  switch (spec.scheme) {
    case SplitScheme::random_pick:
      return {};
    case SplitScheme::cal_split:
    case SplitScheme::tr_split:
      return {0.25, 0.25, 0.5};
    case SplitScheme::ratio:
      return {0.5, 0.5};
  }
  return {};
}

}  // namespace

std::vector<std::vector<std::size_t>> split_folds(std::size_t n, std::span<const double> ratios,
                                                  std::uint64_t seed) {
  if (ratios.empty()) throw Error("split ratios must be nonempty");
  double total = 0.0;
  for (double r : ratios) {
    if (!(r >= 0.0)) throw Error("split ratios must be nonnegative");
    total += r;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error("split ratios must sum to 1");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  auto rng = substream(seed, "split_folds");
  std::shuffle(perm.begin(), perm.end(), rng);

  std::vector<std::vector<std::size_t>> folds(ratios.size());
  std::size_t start = 0;
  for (std::size_t f = 0; f < ratios.size(); ++f) {
    const std::size_t size = f + 1 == ratios.size()
                                 ? n - start
                                 : static_cast<std::size_t>(
                                       std::floor(ratios[f] * static_cast<double>(n) + 1e-9));
    if (size < 2 || start + size > n) {
      throw Error("fold too small: fold " + std::to_string(f) + " of a split of " +
                  std::to_string(n) + " samples needs at least 2");
    }
    folds[f].assign(perm.begin() + static_cast<std::ptrdiff_t>(start),
                    perm.begin() + static_cast<std::ptrdiff_t>(start + size));
    start += size;
  }
  return folds;
}

PreparedSelection prepare_split_baseline(const Problem& problem,
                                         std::span<const CandidateSpec> candidates,
                                         const SplitBaselineSpec& spec, std::uint64_t seed) {
  if (candidates.empty()) throw Error("at least one candidate is required");
  const auto ratios = default_ratios(spec);
  const std::size_t kk = candidates.size();

  auto random_candidate = [&]() -> std::size_t {
    if (kk == 1) return 0;
    auto rng = substream(seed, "base_random");
    return std::uniform_int_distribution<std::size_t>(0, kk - 1)(rng);
  };

  switch (spec.scheme) {
    case SplitScheme::random_pick: {
      if (!ratios.empty()) {
        if (ratios.size() != 2) throw Error("base_random resplitting needs two ratios");
        break;
      }
      if (problem.split().n1 == 0) throw Error("base_random needs preparatory samples");
      const std::size_t k = random_candidate();
      const ScoreFunction fn(candidates[k].score, train(candidates[k].trainer, problem.preparatory()));
      auto scs = prepare_scs(problem, fn, false, seed);
      const std::size_t m = problem.split().m;
      return [scs = std::move(scs), k, m](double q) {
        auto out = scs(q);
        out.selected_models = std::vector<std::size_t>(m, k);
        return out;
      };
    }
    case SplitScheme::cal_split: {
      if (ratios.size() != 3) throw Error("base_cal_split needs three ratios");
      if (problem.split().n1 == 0) throw Error("base_cal_split needs preparatory samples");
      const auto folds = split_folds(problem.split().n2, ratios, seed);
      const auto cal = problem.calibration();
      auto fns = fit_all(candidates, problem.preparatory());
      auto cal_sel = gather(cal, folds[0]);
      auto test_sel = gather(cal, folds[1]);
      auto reduced = with_calibration(problem, gather(cal, folds[2]));
      return [fns = std::move(fns), cal_sel = std::move(cal_sel), test_sel = std::move(test_sel),
              reduced = std::move(reduced)](double q) {
        check_level(q);
        const std::size_t k = pick_largest(fns, cal_sel, test_sel, q);
        return final_scs(reduced, fns[k], k, q);
      };
    }
    case SplitScheme::tr_split: {
      if (ratios.size() != 3) throw Error("base_tr_split needs three ratios");
      const auto folds = split_folds(problem.split().n1, ratios, seed);
      const auto prep = problem.preparatory();
      auto fns = fit_all(candidates, gather(prep, folds[2]));
      auto cal_sel = gather(prep, folds[0]);
      auto test_sel = gather(prep, folds[1]);
      auto reduced = with_calibration(
          problem, std::vector<LabeledSample>(problem.calibration().begin(),
                                              problem.calibration().end()));
      return [fns = std::move(fns), cal_sel = std::move(cal_sel), test_sel = std::move(test_sel),
              reduced = std::move(reduced)](double q) {
        check_level(q);
        const std::size_t k = pick_largest(fns, cal_sel, test_sel, q);
        return final_scs(reduced, fns[k], k, q);
      };
    }
    case SplitScheme::ratio:
      break;
  }

  // Re-split all labeled data: (train, calib) or (train, sel, calib).
  if (ratios.size() != 2 && ratios.size() != 3) {
    throw Error("split ratio baselines need two or three ratios");
  }
  const auto folds = split_folds(problem.labeled().size(), ratios, seed);
  const auto labeled = problem.labeled();
  auto fns = fit_all(candidates, gather(labeled, folds[0]));
  auto reduced = with_calibration(problem, gather(labeled, folds.back()));
  if (ratios.size() == 2) {
    const std::size_t k = random_candidate();
    return [fn = fns[k], reduced = std::move(reduced), k](double q) {
      return final_scs(reduced, fn, k, q);
    };
  }
  const auto& sel = folds[1];
  const std::size_t half = sel.size() / 2;
  if (half < 2 || sel.size() - half < 2) {
    throw Error("fold too small: selection fold must split into halves of at least 2");
  }
  auto cal_sel = gather(labeled, std::vector<std::size_t>(sel.begin(), sel.begin() + static_cast<std::ptrdiff_t>(half)));
  auto test_sel = gather(labeled, std::vector<std::size_t>(sel.begin() + static_cast<std::ptrdiff_t>(half), sel.end()));
  return [fns = std::move(fns), cal_sel = std::move(cal_sel), test_sel = std::move(test_sel),
          reduced = std::move(reduced)](double q) {
    check_level(q);
    const std::size_t k = pick_largest(fns, cal_sel, test_sel, q);
    return final_scs(reduced, fns[k], k, q);
  };
}

SelectionOutcome run_split_baseline(const Problem& problem,
                                    std::span<const CandidateSpec> candidates,
                                    const SplitBaselineSpec& spec, double q, std::uint64_t seed) {
  check_level(q);
  return prepare_split_baseline(problem, candidates, spec, seed)(q);
}

}  // namespace optcs
