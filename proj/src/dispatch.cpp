#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "optcs/procedures.hpp"
#include "optcs/rng.hpp"

namespace optcs {

namespace {

constexpr std::array<std::pair<ProcedureKind, std::string_view>, 10> kKindNames{{
    {ProcedureKind::scs, "scs"},
    {ProcedureKind::greedy, "greedy"},
    {ProcedureKind::base_random, "base_random"},
    {ProcedureKind::base_cal_split, "base_cal_split"},
    {ProcedureKind::base_tr_split, "base_tr_split"},
    {ProcedureKind::base_split_ratio, "base_split_ratio"},
    {ProcedureKind::optcs_msel, "optcs_msel"},
    {ProcedureKind::optcs_full, "optcs_full"},
    {ProcedureKind::optcs_full_sep, "optcs_full_sep"},
    {ProcedureKind::optcs_full_msel, "optcs_full_msel"},
}};

bool single_candidate(ProcedureKind kind) {
  return kind == ProcedureKind::scs || kind == ProcedureKind::optcs_full ||
         kind == ProcedureKind::optcs_full_sep;
}

std::vector<CandidateSpec> resolved_candidates(const ProcedureSpec& spec, std::size_t dim) {
  std::vector<CandidateSpec> out;
  out.reserve(spec.candidates.size());
  for (std::size_t k = 0; k < spec.candidates.size(); ++k) {
    CandidateSpec c = spec.candidates[k];
    c.trainer = resolve_features(std::move(c.trainer), dim, spec.seed, k);
    if (c.trainer.family == TrainerFamily::shuffled_wrapper && !c.trainer.seed) {
      c.trainer.seed = derive_seed(spec.seed, "trainer", k);
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<ScoreFunction> pretrained(const Problem& problem,
                                      const std::vector<CandidateSpec>& candidates,
                                      std::string_view kind) {
  if (problem.split().n1 == 0) {
    throw Error(std::string(kind) + " needs n1 >= 1 preparatory samples to train candidates");
  }
  std::vector<ScoreFunction> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    out.emplace_back(c.score, train(c.trainer, problem.preparatory()));
  }
  return out;
}

std::vector<CandidateTrainer> trainers(const std::vector<CandidateSpec>& candidates) {
  std::vector<CandidateTrainer> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) out.push_back({make_trainer(c.trainer), c.score});
  return out;
}

}  // namespace

std::string_view to_string(ProcedureKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

ProcedureKind parse_procedure_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw Error("unknown procedure kind '" + std::string(name) + "'");
}

bool is_fdr_valid(ProcedureKind kind) { return kind != ProcedureKind::greedy; }

void ProcedureSpec::validate() const {
  check_level(q);
  if (candidates.empty()) throw Error("procedure '" + name + "' has no candidates");
  if (single_candidate(kind) && candidates.size() != 1) {
    throw Error("procedure '" + name + "' of kind " + std::string(to_string(kind)) +
                " takes exactly one candidate");
  }
  for (const auto& c : candidates) {
    c.trainer.validate();
    c.score.validate();
  }
  if (!split_ratios.empty()) {
    double total = 0.0;
    for (double r : split_ratios) {
      if (!(r >= 0.0)) throw Error("split ratios must be nonnegative");
      total += r;
    }
    if (std::abs(total - 1.0) > 1e-9) throw Error("split ratios must sum to 1");
  }
}

bool ProcedureSpec::resolved_oversample() const {
  if (oversample) return *oversample;
  return kind == ProcedureKind::optcs_full || kind == ProcedureKind::optcs_full_msel;
}

PreparedSelection prepare_procedure(const ProcedureSpec& spec, const Problem& input, Exec exec) {
  spec.validate();
  const Problem problem = spec.n1 ? input.with_n1(*spec.n1) : input;
  const auto candidates = resolved_candidates(spec, problem.dim());
  const std::string_view kind = to_string(spec.kind);

  switch (spec.kind) {
    case ProcedureKind::scs: {
      const auto fns = pretrained(problem, candidates, kind);
      return prepare_scs(problem, fns[0], spec.randomized_ties, spec.seed);
    }
    case ProcedureKind::greedy:
      return prepare_greedy(problem, pretrained(problem, candidates, kind));
    case ProcedureKind::optcs_msel:
      return prepare_optcs_msel(problem, pretrained(problem, candidates, kind), spec.prune,
                                spec.seed);
    case ProcedureKind::base_random:
      return prepare_split_baseline(problem, candidates,
                                    {SplitScheme::random_pick, spec.split_ratios}, spec.seed);
    case ProcedureKind::base_cal_split:
      return prepare_split_baseline(problem, candidates,
                                    {SplitScheme::cal_split, spec.split_ratios}, spec.seed);
    case ProcedureKind::base_tr_split:
      return prepare_split_baseline(problem, candidates,
                                    {SplitScheme::tr_split, spec.split_ratios}, spec.seed);
    case ProcedureKind::base_split_ratio:
      return prepare_split_baseline(problem, candidates, {SplitScheme::ratio, spec.split_ratios},
                                    spec.seed);
    case ProcedureKind::optcs_full: {
      const auto binary = reduce_to_binary(problem);
      return prepare_optcs_full(binary, trainers(candidates)[0], spec.resolved_oversample(), exec);
    }
    case ProcedureKind::optcs_full_sep: {
      const auto binary = reduce_to_binary(problem);
      return prepare_optcs_full_sep(binary, trainers(candidates)[0], spec.sep_mode, spec.prune,
                                    spec.resolved_oversample(), spec.seed, exec);
    }
    case ProcedureKind::optcs_full_msel: {
      const auto binary = reduce_to_binary(problem);
      return prepare_optcs_full_msel(binary, trainers(candidates), spec.prune,
                                     spec.resolved_oversample(), spec.seed, exec);
    }
  }
  throw Error("unhandled procedure kind");
}

SelectionOutcome run_procedure(const ProcedureSpec& spec, const Problem& problem, Exec exec) {
  return prepare_procedure(spec, problem, exec)(spec.q);
}

}  // namespace optcs
