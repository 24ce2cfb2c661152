#include "optcs/cli/report.hpp"

#include <ostream>

#include "optcs/cli/csv_io.hpp"

namespace optcs::cli {

using nlohmann::json;

void write_results_csv(std::ostream& out, std::span<const ExperimentReport> reports) {
  out << "procedure,q,rep,fdr,power,n_selected\n";
  for (const auto& r : reports) {
    const auto q = format_double(r.q);
    for (const auto& row : r.per_rep) {
      out << r.procedure << ',' << q << ',' << row.rep + 1 << ',' << format_double(row.fdr) << ','
          << format_double(row.power) << ',' << row.n_selected << '\n';
    }
  }
}

json simulation_summary(const RunConfig& config, std::span<const ExperimentReport> reports) {
  json results = json::array();
  for (const auto& r : reports) {
    double selected = 0.0;
    for (const auto& row : r.per_rep) selected += static_cast<double>(row.n_selected);
    results.push_back({{"procedure", r.procedure},
                       {"kind", to_string(r.kind)},
                       {"fdr_valid", is_fdr_valid(r.kind)},
                       {"q", r.q},
                       {"reps", r.per_rep.size()},
                       {"mean_fdr", r.mean_fdr},
                       {"stderr_fdr", r.stderr_fdr},
                       {"mean_power", r.mean_power},
                       {"stderr_power", r.stderr_power},
                       {"mean_n_selected", selected / static_cast<double>(r.per_rep.size())},
                       {"reps_without_nonnulls", r.flagged}});
  }
  return {{"version", kVersion}, {"config", to_json(config)}, {"results", results}};
}

void write_selection_csv(std::ostream& out, std::span<const NamedSelection> selections) {
  out << "procedure,q,test_index,pvalue,aux_size,xi,model,selected\n";
  for (const auto& s : selections) {
    const auto& o = s.outcome;
    std::vector<bool> chosen(o.pvalues.size(), false);
    for (auto j : o.selected) chosen[j] = true;
    for (std::size_t j = 0; j < o.pvalues.size(); ++j) {
      out << s.procedure << ',' << format_double(s.q) << ',' << j + 1 << ','
          << format_double(o.pvalues[j]) << ',' << format_double(o.aux_sizes[j]) << ','
          << format_double(o.xi[j]) << ',';
      if (o.selected_models) out << (*o.selected_models)[j] + 1;
      out << ',' << (chosen[j] ? 1 : 0) << '\n';
    }
  }
}

json selection_summary(const RunConfig& config, std::span<const NamedSelection> selections) {
  json list = json::array();
  for (const auto& s : selections) {
    const auto& o = s.outcome;
    json selected = json::array();
    for (auto j : o.selected) selected.push_back(j + 1);
    json entry{{"procedure", s.procedure}, {"q", s.q},           {"seed", s.seed},
               {"selected", selected},     {"pvalues", o.pvalues}, {"aux_sizes", o.aux_sizes},
               {"xi", o.xi},               {"r_star", o.r_star}};
    if (o.selected_models) {
      json models = json::array();
      for (auto k : *o.selected_models) models.push_back(k + 1);
      entry["models"] = models;
    }
    list.push_back(entry);
  }
  return {{"version", kVersion}, {"config", to_json(config)}, {"selections", list}};
}

}  // namespace optcs::cli
