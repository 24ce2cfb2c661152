#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "optcs/simlab.hpp"

namespace optcs::cli {

enum class Command { simulate, select };

struct RunConfig {
  Command command = Command::simulate;
  std::optional<DgpSpec> dgp;  // simulate
  DataSplit split;             // select: only n1 is read
  std::vector<ProcedureSpec> procedures;
  std::vector<double> q_grid;
  std::size_t reps = 1;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::optional<PruneMode> prune;  // overrides every procedure
  std::optional<bool> oversample;  // overrides every procedure
  std::string labeled_csv;         // select
  std::string test_csv;            // select
  int threads = 1;                 // never affects results

  void validate() const;
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

// The resolved configuration (overrides applied, defaults filled in);
// excludes the worker count.
nlohmann::json to_json(const RunConfig& config);

std::string_view to_string(Command command);

}  // namespace optcs::cli
