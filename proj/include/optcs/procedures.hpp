#pragma once

// End-to-end selection procedures.
//
// Every procedure is split into a q-independent preparation (score
// generation, which is where all model fitting happens) and a cheap
// selection step. `prepare_*` returns the selection step as a callable so
// experiment grids over q reuse one set of fitted models; `run_*` is
// prepare + select at a single level.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "optcs/core.hpp"
#include "optcs/models.hpp"
#include "optcs/parallel.hpp"
#include "optcs/scores.hpp"

namespace optcs {

using PreparedSelection = std::function<SelectionOutcome(double q)>;

// Scores of one candidate model: n2 calibration entries and m test entries.
struct CandidateScores {
  std::vector<double> calibration;
  std::vector<double> test;
};

CandidateScores candidate_scores(const ScoreFunction& fn, const Problem& problem);

// Per-test-point model choice shared by OptCS-MSel and OptCS-Full-MSel.
// For each j and k, |S_j(k)| is the BH rejection count of the modified
// p-values {p~_l^(j)(k)}_{l != j} plus one always-rejected placeholder;
// k_j maximizes it (ties to the smallest k), R_j = |S_j(k_j)| and p_j uses
// candidate k_j.
SelectionOutcome select_with_per_test_models(std::span<const CandidateScores> candidates,
                                             double q, PruneMode prune, std::uint64_t seed);

// Auxiliary sizes |S_j(k)| for every (j, k), row-major m x K.
std::vector<std::size_t> per_test_selection_sizes(std::span<const CandidateScores> candidates,
                                                  double q);

// Split conformal selection: BH on conformal p-values of a fixed score.
PreparedSelection prepare_scs(const Problem& problem, const ScoreFunction& fn,
                              bool randomized_ties, std::uint64_t seed);
SelectionOutcome run_scs(const Problem& problem, const ScoreFunction& fn, double q,
                         bool randomized_ties = false, std::uint64_t seed = 0);

// Picks the candidate with the largest SCS selection (ties to smallest k).
// Does not control the FDR; kept as the double-dipping baseline.
PreparedSelection prepare_greedy(const Problem& problem, std::span<const ScoreFunction> candidates);
SelectionOutcome run_greedy(const Problem& problem, std::span<const ScoreFunction> candidates,
                            double q);

PreparedSelection prepare_optcs_msel(const Problem& problem,
                                     std::span<const ScoreFunction> candidates, PruneMode prune,
                                     std::uint64_t seed);
SelectionOutcome run_optcs_msel(const Problem& problem, std::span<const ScoreFunction> candidates,
                                double q, PruneMode prune, std::uint64_t seed);

// Leave-one-out scores on the full data pool, then BH (no pruning needed).
// The problem must be binary-reduced.
PreparedSelection prepare_optcs_full(const Problem& problem, const CandidateTrainer& candidate,
                                     bool oversample, Exec exec = {});
SelectionOutcome run_optcs_full(const Problem& problem, const CandidateTrainer& candidate,
                                double q, bool oversample = true, Exec exec = {});

enum class FullSepMode { relaxed_bh, rigorous };
std::string_view to_string(FullSepMode mode);
FullSepMode parse_full_sep_mode(std::string_view name);

// For test point j, models are trained on the labeled data plus only the
// j-th imputed test point (one leave-out per calibration point and one for
// the test point). relaxed_bh applies BH to the resulting p-values;
// rigorous computes auxiliary sizes and prunes.
PreparedSelection prepare_optcs_full_sep(const Problem& problem, const CandidateTrainer& candidate,
                                         FullSepMode mode, PruneMode prune, bool oversample,
                                         std::uint64_t seed, Exec exec = {});
SelectionOutcome run_optcs_full_sep(const Problem& problem, const CandidateTrainer& candidate,
                                    double q, FullSepMode mode, PruneMode prune,
                                    bool oversample = false, std::uint64_t seed = 0,
                                    Exec exec = {});

PreparedSelection prepare_optcs_full_msel(const Problem& problem,
                                          std::span<const CandidateTrainer> candidates,
                                          PruneMode prune, bool oversample, std::uint64_t seed,
                                          Exec exec = {});
SelectionOutcome run_optcs_full_msel(const Problem& problem,
                                     std::span<const CandidateTrainer> candidates, double q,
                                     PruneMode prune, bool oversample = true,
                                     std::uint64_t seed = 0, Exec exec = {});

// y -> 1{y > c}, c -> 0 on labeled and test (hidden) labels.
Problem reduce_to_binary(const Problem& problem);

// ---------------------------------------------------------------------------
// Sample-splitting baselines. These train models themselves, so they take
// trainer specifications rather than fitted score functions.

struct CandidateSpec {
  TrainerSpec trainer;
  ScoreConfig score;
};

enum class SplitScheme {
  random_pick,  // random candidate, existing preparatory/calibration partition
  cal_split,    // calibration -> (calib_sel, test_sel, calib'), default 1:1:2
  tr_split,     // preparatory -> (calib_sel, test_sel, train'), default 1:1:2
  ratio,        // labeled -> (train, calib) with random pick, or (train, sel, calib)
};

struct SplitBaselineSpec {
  SplitScheme scheme = SplitScheme::ratio;
  std::vector<double> ratios;  // must sum to 1; empty selects the scheme default
};

// Random partition of n indices into consecutive folds sized by `ratios`
// (floor for all but the last fold). Throws if a fold has fewer than 2.
std::vector<std::vector<std::size_t>> split_folds(std::size_t n, std::span<const double> ratios,
                                                  std::uint64_t seed);

PreparedSelection prepare_split_baseline(const Problem& problem,
                                         std::span<const CandidateSpec> candidates,
                                         const SplitBaselineSpec& spec, std::uint64_t seed);
SelectionOutcome run_split_baseline(const Problem& problem,
                                    std::span<const CandidateSpec> candidates,
                                    const SplitBaselineSpec& spec, double q, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Declarative procedure description used by the experiment runner and CLI.

enum class ProcedureKind {
  scs,
  greedy,
  base_random,
  base_cal_split,
  base_tr_split,
  base_split_ratio,
  optcs_msel,
  optcs_full,
  optcs_full_sep,
  optcs_full_msel,
};

std::string_view to_string(ProcedureKind kind);
ProcedureKind parse_procedure_kind(std::string_view name);
bool is_fdr_valid(ProcedureKind kind);

struct ProcedureSpec {
  std::string name;
  ProcedureKind kind = ProcedureKind::scs;
  std::vector<CandidateSpec> candidates;
  PruneMode prune = PruneMode::homo;
  double q = 0.1;
  std::optional<bool> oversample;  // default: on for optcs_full(_msel), off otherwise
  std::vector<double> split_ratios;
  std::uint64_t seed = 0;
  std::optional<std::size_t> n1;  // re-partition the labeled data first
  bool randomized_ties = false;   // scs only
  FullSepMode sep_mode = FullSepMode::relaxed_bh;

  void validate() const;
  bool resolved_oversample() const;
};

// Pre-trained procedures (scs, greedy, base_random, base_cal_split,
// optcs_msel) fit their candidates on the preparatory block. Full-data
// procedures reduce the problem to binary labels first.
PreparedSelection prepare_procedure(const ProcedureSpec& spec, const Problem& problem,
                                    Exec exec = {});
SelectionOutcome run_procedure(const ProcedureSpec& spec, const Problem& problem, Exec exec = {});

}  // namespace optcs
