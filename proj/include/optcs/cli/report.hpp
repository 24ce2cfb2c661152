#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include <json.hpp>

#include "optcs/cli/config.hpp"

namespace optcs::cli {

// procedure,q,rep,fdr,power,n_selected with 1-based rep.
void write_results_csv(std::ostream& out, std::span<const ExperimentReport> reports);

nlohmann::json simulation_summary(const RunConfig& config,
                                  std::span<const ExperimentReport> reports);

struct NamedSelection {
  std::string procedure;
  double q = 0.0;
  std::uint64_t seed = 0;
  SelectionOutcome outcome;
};

// Per-test rows: procedure,q,test_index,pvalue,aux_size,xi,model,selected.
void write_selection_csv(std::ostream& out, std::span<const NamedSelection> selections);

// Test indices and model indices are reported 1-based.
nlohmann::json selection_summary(const RunConfig& config,
                                 std::span<const NamedSelection> selections);

}  // namespace optcs::cli
