#pragma once

// Clipped conformity scores and the score-generating functionals used by
// each procedure. All scores are clipped: score(x, y, c) == score(x, c, c)
// whenever y <= c, and monotone nondecreasing in y.

#include <span>
#include <vector>

#include "optcs/core.hpp"
#include "optcs/models.hpp"
#include "optcs/parallel.hpp"

namespace optcs {

class ScoreFunction {
 public:
  // Throws if the model lacks the predictor the configuration needs.
  ScoreFunction(ScoreConfig config, FittedModel model);

  const ScoreConfig& config() const { return config_; }
  const FittedModel& model() const { return model_; }

  // clipped_mean:        M 1{y > c} - mu(x)
  // clipped_studentized: M 1{y > c} - mu(x) / sigma(x)
  // clipped_quantile:    M 1{y > c} - q_alpha(x)
  double operator()(std::span<const double> x, double y, double c) const;

 private:
  ScoreConfig config_;
  FittedModel model_;
};

double clipped_score(const ScoreFunction& fn, std::span<const double> x, double y, double c);

// Trainer paired with the score it feeds; the unit of full-data procedures.
struct CandidateTrainer {
  Trainer trainer;
  ScoreConfig score;
};

// Calibration scores (n2) followed by test scores (m) for one score
// function; test points are scored at their threshold (imputed y = c).
std::vector<double> score_vector_fixed(const ScoreFunction& fn, const Problem& problem);

// All rows identical.
ScoreMatrix generate_scores_fixed(const ScoreFunction& fn, const Problem& problem);

// Row j uses candidate selected[j] (0-based).
ScoreMatrix generate_scores_msel(std::span<const ScoreFunction> candidates, const Problem& problem,
                                 std::span<const std::size_t> selected);

// Throws unless every label is 0/1 and every threshold is 0.
void require_binary(const Problem& problem);

// Training pool for full-data procedures: preparatory, calibration, then
// every test point with imputed null label y = 0.
std::vector<LabeledSample> full_data_pool(const Problem& problem);

// Leave-one-out score vector (n2 + m) for one trainer: entry l is scored by
// a model trained on the pool without point l.
std::vector<double> full_score_vector(const CandidateTrainer& candidate, const Problem& problem,
                                      bool oversample, Exec exec = {});

ScoreMatrix generate_scores_full(const CandidateTrainer& candidate, const Problem& problem,
                                 bool oversample, Exec exec = {});

std::vector<std::vector<double>> generate_scores_full_per_candidate(
    std::span<const CandidateTrainer> candidates, const Problem& problem, bool oversample,
    Exec exec = {});

}  // namespace optcs
