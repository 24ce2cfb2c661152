#include "optcs/scores.hpp"

#include <string>

#include "optcs/kernels.hpp"

namespace optcs {

ScoreFunction::ScoreFunction(ScoreConfig config, FittedModel model)
    : config_(std::move(config)), model_(std::move(model)) {
  config_.validate();
  switch (config_.kind) {
    case ScoreKind::clipped_mean:
      break;
    case ScoreKind::clipped_studentized:
      if (!model_.has_spread()) throw Error("clipped_studentized score needs a spread model");
      break;
    case ScoreKind::clipped_quantile:
      if (!model_.has_quantile()) throw Error("clipped_quantile score needs a quantile model");
      if (model_.quantile_level() && *model_.quantile_level() != *config_.quantile_level) {
        throw Error("quantile model level does not match score quantile_level");
      }
      break;
  }
}

double ScoreFunction::operator()(std::span<const double> x, double y, double c) const {
  const double jump = y > c ? config_.big_m : 0.0;
  switch (config_.kind) {
    case ScoreKind::clipped_mean:
      return jump - model_.predict_mean(x);
    case ScoreKind::clipped_studentized: {
      const double sigma = model_.predict_spread(x);
      if (!(sigma > 0.0)) throw Error("spread prediction must be positive");
      return jump - model_.predict_mean(x) / sigma;
    }
    case ScoreKind::clipped_quantile:
      return jump - model_.predict_quantile(x);
  }
  return jump;
}

double clipped_score(const ScoreFunction& fn, std::span<const double> x, double y, double c) {
  return fn(x, y, c);
}

std::vector<double> score_vector_fixed(const ScoreFunction& fn, const Problem& problem) {
  std::vector<double> out;
  out.reserve(problem.split().n2 + problem.split().m);
  for (const auto& s : problem.calibration()) out.push_back(fn(s.x, s.y, s.c));
  for (const auto& t : problem.test()) out.push_back(fn(t.x, t.c, t.c));
  return out;
}

ScoreMatrix generate_scores_fixed(const ScoreFunction& fn, const Problem& problem) {
  return ScoreMatrix::broadcast(score_vector_fixed(fn, problem), problem.split().m,
                                problem.split().n2);
}

ScoreMatrix generate_scores_msel(std::span<const ScoreFunction> candidates, const Problem& problem,
                                 std::span<const std::size_t> selected) {
  const std::size_t m = problem.split().m;
  if (selected.size() != m) throw Error("need one selected model per test point");
  for (std::size_t k : selected) {
    if (k >= candidates.size()) {
      throw Error("selected model index " + std::to_string(k) + " out of range");
    }
  }
  std::vector<std::vector<double>> per_candidate(candidates.size());
  ScoreMatrix out(m, problem.split().n2);
  for (std::size_t j = 0; j < m; ++j) {
    auto& cached = per_candidate[selected[j]];
    if (cached.empty()) cached = score_vector_fixed(candidates[selected[j]], problem);
    std::copy(cached.begin(), cached.end(), out.row(j).begin());
  }
  return out;
}

void require_binary(const Problem& problem) {
  for (const auto& s : problem.labeled()) {
    if ((s.y != 0.0 && s.y != 1.0) || s.c != 0.0) {
      throw Error("full-data procedures need a binary-reduced problem (y in {0,1}, c = 0)");
    }
  }
  for (const auto& t : problem.test()) {
    if (t.c != 0.0) {
      throw Error("full-data procedures need a binary-reduced problem (y in {0,1}, c = 0)");
    }
  }
}

std::vector<LabeledSample> full_data_pool(const Problem& problem) {
  std::vector<LabeledSample> pool(problem.labeled().begin(), problem.labeled().end());
  pool.reserve(pool.size() + problem.split().m);
  for (const auto& t : problem.test()) pool.push_back({t.x, 0.0, 0.0});
  return pool;
}

std::vector<double> full_score_vector(const CandidateTrainer& candidate, const Problem& problem,
                                      bool oversample, Exec exec) {
  require_binary(problem);
  candidate.score.validate();
  const auto pool = full_data_pool(problem);
  std::vector<double> out(problem.split().n2 + problem.split().m);
  kernels::leave_one_out(
      candidate.trainer, pool, problem.split().n1, oversample,
      [&](std::size_t slot, const FittedModel& model) {
        const ScoreFunction fn(candidate.score, model);
        const auto& z = pool[problem.split().n1 + slot];
        out[slot] = fn(z.x, z.y, z.c);
      },
      exec);
  return out;
}

ScoreMatrix generate_scores_full(const CandidateTrainer& candidate, const Problem& problem,
                                 bool oversample, Exec exec) {
  return ScoreMatrix::broadcast(full_score_vector(candidate, problem, oversample, exec),
                                problem.split().m, problem.split().n2);
}

std::vector<std::vector<double>> generate_scores_full_per_candidate(
    std::span<const CandidateTrainer> candidates, const Problem& problem, bool oversample,
    Exec exec) {
  std::vector<std::vector<double>> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) out.push_back(full_score_vector(c, problem, oversample, exec));
  return out;
}

}  // namespace optcs
