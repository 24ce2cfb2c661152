#include <cmath>
#include <set>
#include <string>

#include "optcs/simlab.hpp"

namespace optcs {

Metrics compute_metrics(const SelectionOutcome& outcome, std::span<const TestSample> test) {
  std::size_t non_null = 0;
  for (const auto& t : test) {
    if (!t.y_hidden) throw Error("compute_metrics needs ground truth on every test sample");
    if (*t.y_hidden > t.c) ++non_null;
  }
  std::size_t false_sel = 0;
  for (std::size_t j : outcome.selected) {
    if (j >= test.size()) throw Error("selected index out of range");
    if (!(*test[j].y_hidden > test[j].c)) ++false_sel;
  }
  Metrics out;
  out.n_selected = outcome.selected.size();
  const std::size_t true_sel = out.n_selected - false_sel;
  out.fdp = out.n_selected == 0 ? 0.0
                                : static_cast<double>(false_sel) /
                                      static_cast<double>(out.n_selected);
  out.h1_empty = non_null == 0;
  out.power = out.h1_empty ? 0.0
                           : static_cast<double>(true_sel) / static_cast<double>(non_null);
  return out;
}

std::uint64_t procedure_seed(std::uint64_t master_seed, std::string_view name, std::size_t rep) {
  return derive_seed(derive_seed(master_seed, "procedure", rep), name);
}

ProcedureSpec resolve_for_rep(const ProcedureSpec& spec, std::size_t dim,
                              std::uint64_t master_seed, std::size_t rep) {
  ProcedureSpec out = spec;
  out.seed = procedure_seed(master_seed, spec.name, rep);
  const std::uint64_t feature_seed = derive_seed(master_seed, "features", rep);
  for (std::size_t k = 0; k < out.candidates.size(); ++k) {
    out.candidates[k].trainer = resolve_features(std::move(out.candidates[k].trainer), dim,
                                                 feature_seed, k);
  }
  return out;
}

namespace {

void summarize(ExperimentReport& report) {
  const double n = static_cast<double>(report.per_rep.size());
  double sf = 0.0, sp = 0.0;
  for (const auto& r : report.per_rep) {
    sf += r.fdr;
    sp += r.power;
    report.flagged += r.h1_empty ? 1 : 0;
  }
  report.mean_fdr = sf / n;
  report.mean_power = sp / n;
  if (report.per_rep.size() < 2) return;
  double vf = 0.0, vp = 0.0;
  for (const auto& r : report.per_rep) {
    vf += (r.fdr - report.mean_fdr) * (r.fdr - report.mean_fdr);
    vp += (r.power - report.mean_power) * (r.power - report.mean_power);
  }
  report.stderr_fdr = std::sqrt(vf / (n - 1.0) / n);
  report.stderr_power = std::sqrt(vp / (n - 1.0) / n);
}

}  // namespace

std::vector<ExperimentReport> run_experiment(const DgpSpec& dgp, DataSplit split,
                                             std::span<const ProcedureSpec> procedures,
                                             std::span<const double> q_grid, std::size_t reps,
                                             std::uint64_t master_seed, Exec exec) {
  dgp.validate();
  if (reps == 0) throw Error("need at least one replication");
  if (procedures.empty()) throw Error("need at least one procedure");
  if (q_grid.empty()) throw Error("need at least one q");
  for (double q : q_grid) check_level(q);
  std::set<std::string> names;
  for (const auto& p : procedures) {
    p.validate();
    if (!names.insert(p.name).second) throw Error("duplicate procedure name '" + p.name + "'");
  }

  const std::size_t np = procedures.size();
  const std::size_t nq = q_grid.size();
  // rows[(rep * np + p) * nq + iq]
  std::vector<RepRow> rows(reps * np * nq);

  parallel_for(reps, exec, [&](std::size_t rep) {
    const Problem full = sample_problem(dgp, split, master_seed, rep);
    const Problem blind = full.without_ground_truth();
    for (std::size_t p = 0; p < np; ++p) {
      const ProcedureSpec spec = resolve_for_rep(procedures[p], dgp.d, master_seed, rep);
      try {
        const auto select = prepare_procedure(spec, blind, Exec::serial());
        for (std::size_t iq = 0; iq < nq; ++iq) {
          const auto m = compute_metrics(select(q_grid[iq]), full.test());
          rows[(rep * np + p) * nq + iq] = {rep, m.fdp, m.power, m.n_selected, m.h1_empty};
        }
      } catch (const std::exception& e) {
        throw Error("replication " + std::to_string(rep) + " (master seed " +
                    std::to_string(master_seed) + ") procedure '" + spec.name +
                    "' failed: " + e.what());
      }
    }
  });

  std::vector<ExperimentReport> reports;
  reports.reserve(np * nq);
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t iq = 0; iq < nq; ++iq) {
      ExperimentReport r;
      r.procedure = procedures[p].name;
      r.kind = procedures[p].kind;
      r.q = q_grid[iq];
      r.per_rep.reserve(reps);
      for (std::size_t rep = 0; rep < reps; ++rep) r.per_rep.push_back(rows[(rep * np + p) * nq + iq]);
      summarize(r);
      reports.push_back(std::move(r));
    }
  }
  return reports;
}

}  // namespace optcs
