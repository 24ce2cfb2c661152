#pragma once

// Synthetic data-generating processes, per-run metrics and the replicated
// experiment runner.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "optcs/core.hpp"
#include "optcs/parallel.hpp"
#include "optcs/procedures.hpp"
#include "optcs/rng.hpp"

namespace optcs {

// liang: linear model x^T theta with Gaussian or t designs/noise.
// jin: nonlinear regression on Unif[-1, 1]^d features.
// jin_cls: binary labels 1{mu(x) + eps > 0}.
enum class DgpFamily { liang, jin, jin_cls };

struct DgpSpec {
  DgpFamily family = DgpFamily::liang;
  int setting = 1;  // 1..4
  std::size_t d = 300;
  double sigma = 3.0;
  double nu = 3.0;                // t degrees of freedom (liang 2 and 4)
  std::size_t theta_period = 20;  // liang: theta_i = 1{i mod period = 0}, i 1-based

  std::string name() const;  // e.g. "jin_cls_2"
  void validate() const;
};

// Family defaults: liang d=300 sigma=3 nu=3; jin d=20 sigma=1; jin_cls d=10 sigma=0.5.
DgpSpec default_dgp(std::string_view name);

// Regression function mu(x) (the latent index for jin_cls).
double dgp_mean(const DgpSpec& spec, std::span<const double> x);

std::vector<LabeledSample> sample_dgp(const DgpSpec& spec, std::size_t n, Rng& rng);

// Draws n1 + n2 labeled and m test samples (ground truth kept in y_hidden)
// from substream(master_seed, "data", rep).
Problem sample_problem(const DgpSpec& spec, DataSplit split, std::uint64_t master_seed,
                       std::uint64_t rep);

struct Metrics {
  double fdp = 0.0;
  double power = 0.0;  // 0 when no test point is non-null
  std::size_t n_selected = 0;
  bool h1_empty = false;
};

// Throws if any test sample lacks ground truth.
Metrics compute_metrics(const SelectionOutcome& outcome, std::span<const TestSample> test);

struct RepRow {
  std::size_t rep = 0;
  double fdr = 0.0;
  double power = 0.0;
  std::size_t n_selected = 0;
  bool h1_empty = false;
};

struct ExperimentReport {
  std::string procedure;
  ProcedureKind kind = ProcedureKind::scs;
  double q = 0.0;
  std::vector<RepRow> per_rep;
  double mean_fdr = 0.0;
  double mean_power = 0.0;
  double stderr_fdr = 0.0;
  double stderr_power = 0.0;
  std::size_t flagged = 0;  // replications with an empty non-null set
};

// One report per (procedure, q), procedures outer. Replications run on
// `exec` workers; every procedure sees the same data within a replication.
// Procedure seeds and random feature subsets derive from (master_seed, rep),
// so results do not depend on the worker count.
std::vector<ExperimentReport> run_experiment(const DgpSpec& dgp, DataSplit split,
                                             std::span<const ProcedureSpec> procedures,
                                             std::span<const double> q_grid, std::size_t reps,
                                             std::uint64_t master_seed, Exec exec = {});

// Seed handed to procedure `name` in replication `rep`.
std::uint64_t procedure_seed(std::uint64_t master_seed, std::string_view name, std::size_t rep);

// The procedure as it is run in replication `rep` (seed and feature subsets
// resolved).
ProcedureSpec resolve_for_rep(const ProcedureSpec& spec, std::size_t dim,
                              std::uint64_t master_seed, std::size_t rep);

}  // namespace optcs
