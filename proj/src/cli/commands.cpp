#include "optcs/cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "optcs/cli/csv_io.hpp"
#include "optcs/cli/report.hpp"

namespace optcs::cli {

namespace {

std::ofstream open_output(const std::string& dir, const char* file) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / file;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

void write_json(const std::string& dir, const nlohmann::json& doc) {
  auto out = open_output(dir, "summary.json");
  out << doc.dump(2) << '\n';
}

}  // namespace

int cmd_simulate(const RunConfig& config) {
  if (config.command != Command::simulate) throw Error("config is not a simulate config");
  config.validate();
  const auto reports = run_experiment(*config.dgp, config.split, config.procedures,
                                      config.q_grid, config.reps, config.seed,
                                      Exec{config.threads});
  {
    auto out = open_output(config.out_dir, "results.csv");
    write_results_csv(out, reports);
  }
  write_json(config.out_dir, simulation_summary(config, reports));
  return 0;
}

int cmd_select(const RunConfig& config) {
  if (config.command != Command::select) throw Error("config is not a select config");
  config.validate();
  auto labeled = read_labeled_csv_file(config.labeled_csv);
  auto test = read_test_csv_file(config.test_csv);
  if (test.empty()) throw Error(config.test_csv + ": test set has no rows");
  const std::size_t n1 = config.split.n1;
  if (labeled.size() < n1 + 1) {
    throw Error("n2 too small: " + std::to_string(labeled.size()) + " labeled rows leave no " +
                "calibration samples after n1 = " + std::to_string(n1));
  }
  const DataSplit split{n1, labeled.size() - n1, test.size()};
  const Problem problem =
      validate_problem(std::move(labeled), std::move(test), split).without_ground_truth();

  std::vector<NamedSelection> selections;
  for (const auto& proc : config.procedures) {
    const ProcedureSpec spec = resolve_for_rep(proc, problem.dim(), config.seed, 0);
    const auto select = prepare_procedure(spec, problem, Exec{config.threads});
    for (double q : config.q_grid) selections.push_back({spec.name, q, spec.seed, select(q)});
  }
  {
    auto out = open_output(config.out_dir, "results.csv");
    write_selection_csv(out, selections);
  }
  write_json(config.out_dir, selection_summary(config, selections));
  return 0;
}

int run_cli(int argc, const char* const* argv, std::ostream& err) {
  CLI::App app{"OptCS: simulate selection experiments or select test rows from CSV data"};
  app.set_version_flag("--version", std::string(kVersion));
  std::string config_path;
  std::vector<double> q;
  std::optional<std::size_t> reps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> prune;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<bool> oversample;
  app.add_option("--config", config_path, "JSON configuration file")->required();
  app.add_option("--q", q, "target FDR level(s), overrides the config");
  app.add_option("--reps", reps, "number of replications (simulate)");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--prune", prune, "pruning mode for every procedure")
      ->check(CLI::IsMember({"hete", "homo", "dtm"}));
  app.add_option("--out", out, "output directory");
  app.add_option("--threads", threads, "worker threads (results do not depend on it)");
  app.add_option("--oversample", oversample, "class balancing for full-data procedures");
  auto* simulate = app.add_subcommand("simulate", "run a replicated simulation");
  auto* select = app.add_subcommand("select", "select test rows from CSV data");
  simulate->fallthrough();
  select->fallthrough();
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg_out, msg_err;
    const int code = app.exit(e, msg_out, msg_err);
    err << msg_out.str() << msg_err.str();
    return code;
  }

  try {
    RunConfig config = load_config(config_path);
    if (simulate->parsed()) config.command = Command::simulate;
    if (select->parsed()) config.command = Command::select;
    if (!q.empty()) config.q_grid = q;
    if (reps) config.reps = *reps;
    if (seed) config.seed = *seed;
    if (out) config.out_dir = *out;
    if (threads) config.threads = *threads;
    if (prune) config.prune = parse_prune_mode(*prune);
    if (oversample) config.oversample = *oversample;
    for (auto& p : config.procedures) {
      if (config.prune) p.prune = *config.prune;
      if (config.oversample) p.oversample = *config.oversample;
    }
    return config.command == Command::simulate ? cmd_simulate(config) : cmd_select(config);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace optcs::cli
