#include "optcs/procedures.hpp"

#include <algorithm>
#include <string>

#include "optcs/kernels.hpp"
#include "optcs/mtest.hpp"
#include "optcs/pvalues.hpp"
#include "optcs/rng.hpp"

namespace optcs {

namespace {

// BH on its own p-values, reported with aux = |S| and no pruning.
SelectionOutcome bh_outcome(std::vector<double> pvalues, double q) {
  check_level(q);
  SelectionOutcome out;
  out.selected = bh(pvalues, q);
  const std::size_t m = pvalues.size();
  out.pvalues = std::move(pvalues);
  out.aux_sizes.assign(m, static_cast<double>(out.selected.size()));
  out.xi.assign(m, 1.0);
  out.r_star = out.selected.size();
  return out;
}

std::vector<double> conformal_pvalues(const CandidateScores& s) {
  const CalibrationRanks ranks(s.calibration);
  const double denom = static_cast<double>(ranks.size() + 1);
  std::vector<double> p(s.test.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    p[j] = static_cast<double>(1 + ranks.count_le(s.test[j])) / denom;
  }
  return p;
}

CandidateScores split_vector(const std::vector<double>& v, std::size_t n2) {
  return {std::vector<double>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n2)),
          std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(n2), v.end())};
}

void require_candidates(std::size_t k) {
  if (k == 0) throw Error("at least one candidate is required");
}

}  // namespace

CandidateScores candidate_scores(const ScoreFunction& fn, const Problem& problem) {
  return split_vector(score_vector_fixed(fn, problem), problem.split().n2);
}

std::vector<std::size_t> per_test_selection_sizes(std::span<const CandidateScores> candidates,
                                                  double q) {
  check_level(q);
  require_candidates(candidates.size());
  const std::size_t kk = candidates.size();
  const std::size_t m = candidates[0].test.size();
  std::vector<std::size_t> sizes(m * kk, 0);
  std::vector<double> work(m);
  for (std::size_t k = 0; k < kk; ++k) {
    const auto& cand = candidates[k];
    if (cand.test.size() != m) throw Error("candidates disagree on the number of test points");
    const CalibrationRanks ranks(cand.calibration);
    const double denom = static_cast<double>(ranks.size() + 1);
    std::vector<std::size_t> base(m);
    for (std::size_t l = 0; l < m; ++l) base[l] = ranks.count_le(cand.test[l]);
    for (std::size_t j = 0; j < m; ++j) {
      const double tj = cand.test[j];
      work[0] = 0.0;  // the always-rejected placeholder
      std::size_t w = 1;
      for (std::size_t l = 0; l < m; ++l) {
        if (l == j) continue;
        const std::size_t extra = tj <= cand.test[l] ? 1 : 0;
        work[w++] = static_cast<double>(base[l] + extra) / denom;
      }
      sizes[j * kk + k] = bh_rstar(work, q);
    }
  }
  return sizes;
}

SelectionOutcome select_with_per_test_models(std::span<const CandidateScores> candidates,
                                             double q, PruneMode prune, std::uint64_t seed) {
  const auto sizes = per_test_selection_sizes(candidates, q);
  const std::size_t kk = candidates.size();
  const std::size_t m = candidates[0].test.size();

  std::vector<std::size_t> chosen(m, 0);
  std::vector<double> aux(m);
  for (std::size_t j = 0; j < m; ++j) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < kk; ++k) {
      if (sizes[j * kk + k] > sizes[j * kk + best]) best = k;
    }
    chosen[j] = best;
    aux[j] = static_cast<double>(sizes[j * kk + best]);
  }

  std::vector<std::vector<double>> per_candidate_p(kk);
  std::vector<double> p(m);
  for (std::size_t j = 0; j < m; ++j) {
    auto& cached = per_candidate_p[chosen[j]];
    if (cached.empty()) cached = conformal_pvalues(candidates[chosen[j]]);
    p[j] = cached[j];
  }

  auto out = optcs_select(p, aux, q, prune, seed);
  out.selected_models = std::move(chosen);
  return out;
}

// ---------------------------------------------------------------------------

PreparedSelection prepare_scs(const Problem& problem, const ScoreFunction& fn,
                              bool randomized_ties, std::uint64_t seed) {
  auto scores = candidate_scores(fn, problem);
  std::vector<double> p;
  if (randomized_ties) {
    auto rng = substream(seed, "scs_ties");
    p.resize(scores.test.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
      p[j] = conformal_pvalue_randomized(scores.calibration, scores.test[j], uniform01(rng));
    }
  } else {
    p = conformal_pvalues(scores);
  }
  return [p = std::move(p)](double q) { return bh_outcome(p, q); };
}

SelectionOutcome run_scs(const Problem& problem, const ScoreFunction& fn, double q,
                         bool randomized_ties, std::uint64_t seed) {
  check_level(q);
  return prepare_scs(problem, fn, randomized_ties, seed)(q);
}

PreparedSelection prepare_greedy(const Problem& problem,
                                 std::span<const ScoreFunction> candidates) {
  require_candidates(candidates.size());
  std::vector<std::vector<double>> pvals;
  pvals.reserve(candidates.size());
  for (const auto& fn : candidates) pvals.push_back(conformal_pvalues(candidate_scores(fn, problem)));
  return [pvals = std::move(pvals)](double q) {
    check_level(q);
    std::size_t best = 0;
    std::size_t best_size = bh_rstar(pvals[0], q);
    for (std::size_t k = 1; k < pvals.size(); ++k) {
      const std::size_t size = bh_rstar(pvals[k], q);
      if (size > best_size) {
        best = k;
        best_size = size;
      }
    }
    auto out = bh_outcome(pvals[best], q);
    out.selected_models = std::vector<std::size_t>(out.pvalues.size(), best);
    return out;
  };
}

SelectionOutcome run_greedy(const Problem& problem, std::span<const ScoreFunction> candidates,
                            double q) {
  check_level(q);
  return prepare_greedy(problem, candidates)(q);
}

PreparedSelection prepare_optcs_msel(const Problem& problem,
                                     std::span<const ScoreFunction> candidates, PruneMode prune,
                                     std::uint64_t seed) {
  require_candidates(candidates.size());
  std::vector<CandidateScores> scores;
  scores.reserve(candidates.size());
  for (const auto& fn : candidates) scores.push_back(candidate_scores(fn, problem));
  return [scores = std::move(scores), prune, seed](double q) {
    return select_with_per_test_models(scores, q, prune, seed);
  };
}

SelectionOutcome run_optcs_msel(const Problem& problem, std::span<const ScoreFunction> candidates,
                                double q, PruneMode prune, std::uint64_t seed) {
  check_level(q);
  return prepare_optcs_msel(problem, candidates, prune, seed)(q);
}

PreparedSelection prepare_optcs_full(const Problem& problem, const CandidateTrainer& candidate,
                                     bool oversample, Exec exec) {
  const auto v = full_score_vector(candidate, problem, oversample, exec);
  auto p = conformal_pvalues(split_vector(v, problem.split().n2));
  return [p = std::move(p)](double q) { return bh_outcome(p, q); };
}

SelectionOutcome run_optcs_full(const Problem& problem, const CandidateTrainer& candidate,
                                double q, bool oversample, Exec exec) {
  check_level(q);
  return prepare_optcs_full(problem, candidate, oversample, exec)(q);
}

std::string_view to_string(FullSepMode mode) {
  return mode == FullSepMode::relaxed_bh ? "relaxed_bh" : "rigorous";
}

FullSepMode parse_full_sep_mode(std::string_view name) {
  if (name == "relaxed_bh") return FullSepMode::relaxed_bh;
  if (name == "rigorous") return FullSepMode::rigorous;
  throw Error("unknown full_sep mode '" + std::string(name) + "'");
}

PreparedSelection prepare_optcs_full_sep(const Problem& problem, const CandidateTrainer& candidate,
                                         FullSepMode mode, PruneMode prune, bool oversample,
                                         std::uint64_t seed, Exec exec) {
  require_binary(problem);
  candidate.score.validate();
  const std::size_t n1 = problem.split().n1;
  const std::size_t n2 = problem.split().n2;
  const std::size_t m = problem.split().m;
  const double denom = static_cast<double>(n2 + 1);

  std::vector<LabeledSample> pool(problem.labeled().begin(), problem.labeled().end());
  pool.push_back({});

  std::vector<double> p(m);
  // Per j: test_under[i * m + l] = V(x_{n+l}, c | model i), i in [0, n2]
  // where i = n2 is the model that leaves out the imputed test point.
  std::vector<double> cal(n2);
  std::vector<double> test_under((n2 + 1) * m);
  std::vector<std::vector<double>> modified;
  if (mode == FullSepMode::rigorous) modified.assign(m, {});

  for (std::size_t j = 0; j < m; ++j) {
    const auto& tj = problem.test()[j];
    pool.back() = {tj.x, 0.0, 0.0};
    kernels::leave_one_out(
        candidate.trainer, pool, n1, oversample,
        [&](std::size_t slot, const FittedModel& model) {
          const ScoreFunction fn(candidate.score, model);
          if (slot < n2) {
            const auto& z = pool[n1 + slot];
            cal[slot] = fn(z.x, z.y, z.c);
          }
          if (slot == n2 || mode == FullSepMode::rigorous) {
            for (std::size_t l = 0; l < m; ++l) {
              const auto& t = problem.test()[l];
              test_under[slot * m + l] = fn(t.x, t.c, t.c);
            }
          }
        },
        exec);

    const double* own = test_under.data() + n2 * m;
    std::size_t count = 0;
    for (double v : cal) count += v <= own[j] ? 1 : 0;
    p[j] = static_cast<double>(1 + count) / denom;

    if (mode == FullSepMode::rigorous) {
      auto& row = modified[j];
      row.reserve(m);
      row.push_back(0.0);
      for (std::size_t l = 0; l < m; ++l) {
        if (l == j) continue;
        std::size_t c = 0;
        for (std::size_t i = 0; i < n2; ++i) c += cal[i] <= test_under[i * m + l] ? 1 : 0;
        c += own[j] <= own[l] ? 1 : 0;
        row.push_back(static_cast<double>(c) / denom);
      }
    }
  }

  if (mode == FullSepMode::relaxed_bh) {
    return [p = std::move(p)](double q) { return bh_outcome(p, q); };
  }
  return [p = std::move(p), modified = std::move(modified), prune, seed](double q) {
    check_level(q);
    std::vector<double> aux(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
      aux[j] = static_cast<double>(bh_rstar(modified[j], q));
    }
    return optcs_select(p, aux, q, prune, seed);
  };
}

SelectionOutcome run_optcs_full_sep(const Problem& problem, const CandidateTrainer& candidate,
                                    double q, FullSepMode mode, PruneMode prune, bool oversample,
                                    std::uint64_t seed, Exec exec) {
  check_level(q);
  return prepare_optcs_full_sep(problem, candidate, mode, prune, oversample, seed, exec)(q);
}

PreparedSelection prepare_optcs_full_msel(const Problem& problem,
                                          std::span<const CandidateTrainer> candidates,
                                          PruneMode prune, bool oversample, std::uint64_t seed,
                                          Exec exec) {
  require_candidates(candidates.size());
  const auto vectors = generate_scores_full_per_candidate(candidates, problem, oversample, exec);
  std::vector<CandidateScores> scores;
  scores.reserve(vectors.size());
  for (const auto& v : vectors) scores.push_back(split_vector(v, problem.split().n2));
  return [scores = std::move(scores), prune, seed](double q) {
    return select_with_per_test_models(scores, q, prune, seed);
  };
}

SelectionOutcome run_optcs_full_msel(const Problem& problem,
                                     std::span<const CandidateTrainer> candidates, double q,
                                     PruneMode prune, bool oversample, std::uint64_t seed,
                                     Exec exec) {
  check_level(q);
  return prepare_optcs_full_msel(problem, candidates, prune, oversample, seed, exec)(q);
}

Problem reduce_to_binary(const Problem& problem) {
  std::vector<LabeledSample> labeled;
  labeled.reserve(problem.labeled().size());
  for (const auto& s : problem.labeled()) labeled.push_back({s.x, s.y > s.c ? 1.0 : 0.0, 0.0});
  std::vector<TestSample> test;
  test.reserve(problem.test().size());
  for (const auto& t : problem.test()) {
    std::optional<double> hidden;
    if (t.y_hidden) hidden = *t.y_hidden > t.c ? 1.0 : 0.0;
    test.push_back({t.x, 0.0, hidden});
  }
  return validate_problem(std::move(labeled), std::move(test), problem.split());
}

}  // namespace optcs
