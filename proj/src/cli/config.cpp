#include "optcs/cli/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <string_view>

namespace optcs::cli {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw Error(std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw Error("unknown key '" + key + "' in " + std::string(where));
  }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(std::string("invalid value for '") + key + "'");
  }
}

TrainerSpec parse_trainer(const json& j) {
  check_keys(j, "trainer",
             {"family", "ridge_lambda", "quantile_level", "knn_k", "gd_steps", "gd_rate",
              "fit_spread", "spread_floor", "features", "random_features", "feature_key", "seed"});
  TrainerSpec t;
  if (!j.contains("family")) throw Error("trainer needs a 'family'");
  t.family = parse_trainer_family(j.at("family").get<std::string>());
  t.ridge_lambda = get_or(j, "ridge_lambda", t.ridge_lambda);
  t.quantile_level = get_or(j, "quantile_level", t.quantile_level);
  t.knn_k = get_or(j, "knn_k", t.knn_k);
  t.gd_steps = get_or(j, "gd_steps", t.gd_steps);
  t.gd_rate = get_or(j, "gd_rate", t.gd_rate);
  t.fit_spread = get_or(j, "fit_spread", t.fit_spread);
  t.spread_floor = get_or(j, "spread_floor", t.spread_floor);
  // Feature columns are 1-based in configs, matching the x_1..x_d headers.
  for (auto f : get_or(j, "features", std::vector<std::size_t>{})) {
    if (f == 0) throw Error("feature indices are 1-based");
    t.features.push_back(f - 1);
  }
  t.random_features = get_or(j, "random_features", t.random_features);
  if (j.contains("feature_key")) t.feature_key = j.at("feature_key").get<std::uint64_t>();
  if (j.contains("seed")) t.seed = j.at("seed").get<std::uint64_t>();
  return t;
}

ScoreConfig parse_score(const json& j, const TrainerSpec& trainer) {
  check_keys(j, "score", {"kind", "big_m", "quantile_level"});
  ScoreConfig s;
  s.kind = parse_score_kind(get_or<std::string>(j, "kind", "clipped_mean"));
  s.big_m = get_or(j, "big_m", s.big_m);
  if (j.contains("quantile_level")) {
    s.quantile_level = j.at("quantile_level").get<double>();
  } else if (s.kind == ScoreKind::clipped_quantile) {
    s.quantile_level = trainer.quantile_level;
  }
  return s;
}

ProcedureSpec parse_procedure(const json& j) {
  check_keys(j, "procedure",
             {"name", "kind", "candidates", "prune", "oversample", "split_ratios", "n1",
              "randomized_ties", "sep_mode"});
  ProcedureSpec p;
  if (!j.contains("kind")) throw Error("procedure needs a 'kind'");
  p.kind = parse_procedure_kind(j.at("kind").get<std::string>());
  p.name = get_or<std::string>(j, "name", std::string(to_string(p.kind)));
  if (!j.contains("candidates") || !j.at("candidates").is_array()) {
    throw Error("procedure '" + p.name + "' needs a 'candidates' array");
  }
  for (const auto& c : j.at("candidates")) {
    check_keys(c, "candidate", {"trainer", "score"});
    if (!c.contains("trainer")) throw Error("candidate needs a 'trainer'");
    CandidateSpec spec;
    spec.trainer = parse_trainer(c.at("trainer"));
    spec.score = parse_score(c.contains("score") ? c.at("score") : json::object(), spec.trainer);
    p.candidates.push_back(std::move(spec));
  }
  if (j.contains("prune")) p.prune = parse_prune_mode(j.at("prune").get<std::string>());
  if (j.contains("oversample")) p.oversample = j.at("oversample").get<bool>();
  p.split_ratios = get_or(j, "split_ratios", std::vector<double>{});
  if (j.contains("n1")) p.n1 = j.at("n1").get<std::size_t>();
  p.randomized_ties = get_or(j, "randomized_ties", false);
  if (j.contains("sep_mode")) p.sep_mode = parse_full_sep_mode(j.at("sep_mode").get<std::string>());
  return p;
}

DgpSpec parse_dgp(const json& j) {
  check_keys(j, "dgp", {"name", "d", "sigma", "nu", "theta_period"});
  if (!j.contains("name")) throw Error("dgp needs a 'name'");
  DgpSpec d = default_dgp(j.at("name").get<std::string>());
  d.d = get_or(j, "d", d.d);
  d.sigma = get_or(j, "sigma", d.sigma);
  d.nu = get_or(j, "nu", d.nu);
  d.theta_period = get_or(j, "theta_period", d.theta_period);
  d.validate();
  return d;
}

Command parse_command(const std::string& name) {
  if (name == "simulate") return Command::simulate;
  if (name == "select") return Command::select;
  throw Error("unknown command '" + name + "'");
}

json trainer_json(const TrainerSpec& t) {
  json j{{"family", to_string(t.family)},
         {"ridge_lambda", t.ridge_lambda},
         {"quantile_level", t.quantile_level},
         {"knn_k", t.knn_k},
         {"gd_steps", t.gd_steps},
         {"gd_rate", t.gd_rate},
         {"fit_spread", t.fit_spread},
         {"spread_floor", t.spread_floor},
         {"random_features", t.random_features}};
  json features = json::array();
  for (auto f : t.features) features.push_back(f + 1);
  j["features"] = features;
  if (t.feature_key) j["feature_key"] = *t.feature_key;
  if (t.seed) j["seed"] = *t.seed;
  return j;
}

}  // namespace

std::string_view to_string(Command command) {
  return command == Command::simulate ? "simulate" : "select";
}

void RunConfig::validate() const {
  if (procedures.empty()) throw Error("config needs at least one procedure");
  if (q_grid.empty()) throw Error("config needs at least one q");
  for (double q : q_grid) check_level(q);
  std::set<std::string> names;
  for (const auto& p : procedures) {
    p.validate();
    if (!names.insert(p.name).second) throw Error("duplicate procedure name '" + p.name + "'");
  }
  if (threads < 1) throw Error("threads must be >= 1");
  if (command == Command::simulate) {
    if (!dgp) throw Error("simulate needs a 'dgp'");
    if (reps == 0) throw Error("reps must be >= 1");
    if (split.n2 == 0) throw Error("split needs n2 >= 1");
    if (split.m == 0) throw Error("split needs m >= 1");
  } else {
    if (labeled_csv.empty() || test_csv.empty()) {
      throw Error("select needs 'labeled_csv' and 'test_csv'");
    }
  }
}

RunConfig parse_config(const json& doc) {
  check_keys(doc, "config",
             {"command", "dgp", "split", "procedures", "q", "reps", "seed", "out", "prune",
              "oversample", "labeled_csv", "test_csv", "threads"});
  RunConfig c;
  try {
    if (doc.contains("command")) c.command = parse_command(doc.at("command").get<std::string>());
    if (doc.contains("dgp")) c.dgp = parse_dgp(doc.at("dgp"));
    if (doc.contains("split")) {
      const auto& s = doc.at("split");
      check_keys(s, "split", {"n1", "n2", "m"});
      c.split.n1 = get_or(s, "n1", std::size_t{0});
      c.split.n2 = get_or(s, "n2", std::size_t{0});
      c.split.m = get_or(s, "m", std::size_t{0});
    }
    if (doc.contains("procedures")) {
      for (const auto& p : doc.at("procedures")) c.procedures.push_back(parse_procedure(p));
    }
    if (doc.contains("q")) {
      const auto& q = doc.at("q");
      c.q_grid = q.is_array() ? q.get<std::vector<double>>() : std::vector<double>{q.get<double>()};
    }
    c.reps = get_or(doc, "reps", c.reps);
    c.seed = get_or(doc, "seed", c.seed);
    c.out_dir = get_or(doc, "out", c.out_dir);
    if (doc.contains("prune")) c.prune = parse_prune_mode(doc.at("prune").get<std::string>());
    if (doc.contains("oversample")) c.oversample = doc.at("oversample").get<bool>();
    c.labeled_csv = get_or<std::string>(doc, "labeled_csv", "");
    c.test_csv = get_or<std::string>(doc, "test_csv", "");
    c.threads = get_or(doc, "threads", c.threads);
  } catch (const json::exception& e) {
    throw Error(std::string("malformed config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

json to_json(const RunConfig& c) {
  json j;
  j["command"] = to_string(c.command);
  if (c.dgp) {
    j["dgp"] = {{"name", c.dgp->name()},
                {"d", c.dgp->d},
                {"sigma", c.dgp->sigma},
                {"nu", c.dgp->nu},
                {"theta_period", c.dgp->theta_period},
                {"x_distribution",
                 c.dgp->family == DgpFamily::liang ? "normal or t, independent coordinates"
                                                   : "uniform on [-1, 1]^d"}};
  }
  j["split"] = {{"n1", c.split.n1}, {"n2", c.split.n2}, {"m", c.split.m}};
  json procs = json::array();
  for (const auto& p : c.procedures) {
    json pj{{"name", p.name},
            {"kind", to_string(p.kind)},
            {"prune", to_string(p.prune)},
            {"oversample", p.resolved_oversample()},
            {"split_ratios", p.split_ratios},
            {"randomized_ties", p.randomized_ties},
            {"sep_mode", to_string(p.sep_mode)}};
    if (p.n1) pj["n1"] = *p.n1;
    json cands = json::array();
    for (const auto& cand : p.candidates) {
      json sj{{"kind", to_string(cand.score.kind)}, {"big_m", cand.score.big_m}};
      if (cand.score.quantile_level) sj["quantile_level"] = *cand.score.quantile_level;
      cands.push_back({{"trainer", trainer_json(cand.trainer)}, {"score", sj}});
    }
    pj["candidates"] = cands;
    procs.push_back(pj);
  }
  j["procedures"] = procs;
  j["q"] = c.q_grid;
  j["reps"] = c.reps;
  j["seed"] = c.seed;
  if (c.command == Command::select) {
    j["labeled_csv"] = c.labeled_csv;
    j["test_csv"] = c.test_csv;
  }
  return j;
}

}  // namespace optcs::cli
