#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "optcs/cli/commands.hpp"
#include "optcs/cli/csv_io.hpp"
#include "testing.hpp"

using namespace optcs;
using namespace optcs::cli;
using optcs::testing::throws_containing;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("optcs_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

int run(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "optcs");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), err);
  if (err_text) *err_text = err.str();
  return code;
}

const char* kSimConfig = R"({
  "command": "simulate",
  "dgp": {"name": "jin_cls_1"},
  "split": {"n1": 20, "n2": 20, "m": 10},
  "q": [0.2, 0.4],
  "reps": 2,
  "seed": 3,
  "procedures": [
    {"name": "scs", "kind": "scs",
     "candidates": [{"trainer": {"family": "ridge"}}]},
    {"name": "msel", "kind": "optcs_msel",
     "candidates": [{"trainer": {"family": "ridge", "random_features": 3}},
                    {"trainer": {"family": "knn", "knn_k": 3}}]}
  ]
})";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("CSV round trip is exact") {
    auto rng = substream(1, "cli");
    auto labeled = testing::random_labeled(rng, 15, 3, false);
    labeled[0].x[1] = 0.1 + 0.2;
    labeled[1].y = -1e-300;
    labeled[2].c = 12345.678901234567;
    std::stringstream buf;
    write_labeled_csv(buf, labeled);
    const auto back = read_labeled_csv(buf, "mem");
    CHECK(std::ranges::equal(back, labeled));

    std::vector<TestSample> test{{{1.5, -2.0}, 0.25, std::nullopt}, {{0.0, 3.0}, 0.0, std::nullopt}};
    std::stringstream tbuf;
    write_test_csv(tbuf, test);
    CHECK(tbuf.str().starts_with("x_1,x_2,c\n"));
    CHECK(std::ranges::equal(read_test_csv(tbuf, "mem"), test));
    test[0].y_hidden = 1.0;
    test[1].y_hidden = -1.0;
    std::stringstream gbuf;
    write_test_csv(gbuf, test);
    CHECK(std::ranges::equal(read_test_csv(gbuf, "mem"), test));
  }

  TEST_CASE("CSV columns may come in any order") {
    std::stringstream in("c,y,x_2,x_1\n0,1,20,10\n0.5,0,-2,-1\n");
    const auto rows = read_labeled_csv(in, "mem");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].x == Vector{10, 20});
    CHECK(rows[1].c == 0.5);
  }

  TEST_CASE("CSV errors name the problem") {
    auto parse = [](const std::string& text) {
      std::stringstream in(text);
      return read_labeled_csv(in, "data.csv");
    };
    CHECK(throws_containing([&] { parse("x_1,c\n1,0\n"); }, "missing column 'y'"));
    CHECK(throws_containing([&] { parse("x_1,y\n1,0\n"); }, "missing column 'c'"));
    CHECK(throws_containing([&] { parse("x_1,x_3,y,c\n1,2,0,0\n"); }, "x_2"));
    CHECK(throws_containing([&] { parse("x_1,y,c\n1,nan,0\n"); }, "non-finite"));
    CHECK(throws_containing([&] { parse("x_1,y,c\n1,abc,0\n"); }, "not a number"));
    CHECK(throws_containing([&] { parse("x_1,y,c\n1,0\n"); }, "data.csv"));
    CHECK(throws_containing([&] { parse("x_1,y,c,w\n1,0,0,0\n"); }, "unexpected column"));
    CHECK(throws_containing([&] { parse("x_1,y,y,c\n1,0,0,0\n"); }, "duplicate"));
    CHECK(throws_containing([&] { parse("x_1,c\n"); }, "missing column 'y'"));
  }

  TEST_CASE("config parsing") {
    const auto c = parse_config(nlohmann::json::parse(kSimConfig));
    CHECK(c.command == Command::simulate);
    CHECK(c.q_grid == std::vector<double>{0.2, 0.4});
    CHECK(c.procedures.size() == 2);
    CHECK(c.procedures[1].candidates[1].trainer.knn_k == 3);
    CHECK(c.dgp->name() == "jin_cls_1");
    CHECK(throws_containing([] { parse_config(nlohmann::json::parse(R"({"bogus": 1})")); },
                            "unknown key 'bogus'"));
    CHECK(throws_containing(
        [] { parse_config(nlohmann::json::parse(R"({"dgp": {"name": "nowhere_1"}})")); },
        "unknown dgp"));
    auto one_based = nlohmann::json::parse(kSimConfig);
    one_based["procedures"][0]["candidates"][0]["trainer"]["features"] = {1, 3};
    CHECK(parse_config(one_based).procedures[0].candidates[0].trainer.features ==
          std::vector<std::size_t>{0, 2});
    CHECK(to_json(parse_config(one_based))["procedures"][0]["candidates"][0]["trainer"]["features"] ==
          nlohmann::json({1, 3}));
  }

  TEST_CASE("simulate writes deterministic outputs") {
    const auto dir = scratch("simulate");
    spit(dir / "config.json", kSimConfig);
    const auto config = (dir / "config.json").string();
    REQUIRE(run({"simulate", "--config", config, "--out", (dir / "a").string()}) == 0);
    REQUIRE(run({"--config", config, "--out", (dir / "b").string(), "--threads", "3"}) == 0);
    const auto a = slurp(dir / "a" / "results.csv");
    CHECK(a == slurp(dir / "b" / "results.csv"));
    CHECK(slurp(dir / "a" / "summary.json") == slurp(dir / "b" / "summary.json"));
    std::istringstream lines(a);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "procedure,q,rep,fdr,power,n_selected");
    std::size_t rows = 0;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 2 * 2 * 2);

    const auto summary = nlohmann::json::parse(slurp(dir / "a" / "summary.json"));
    CHECK(summary["results"].size() == 4);
    CHECK(summary["results"][0]["fdr_valid"] == true);
    CHECK_FALSE(summary["config"].contains("threads"));

    REQUIRE(run({"--config", config, "--out", (dir / "c").string(), "--seed", "4"}) == 0);
    CHECK(slurp(dir / "c" / "results.csv") != a);
  }

  TEST_CASE("bad inputs exit nonzero with a message") {
    const auto dir = scratch("errors");
    std::string err;
    CHECK(run({"--config", (dir / "missing.json").string()}, &err) != 0);
    CHECK(err.find("cannot open") != std::string::npos);

    auto doc = nlohmann::json::parse(kSimConfig);
    doc["dgp"]["name"] = "liang_9";
    spit(dir / "bad_dgp.json", doc.dump());
    CHECK(run({"--config", (dir / "bad_dgp.json").string(), "--out", dir.string()}, &err) != 0);
    CHECK(err.find("unknown dgp") != std::string::npos);

    spit(dir / "ok.json", kSimConfig);
    CHECK(run({"--config", (dir / "ok.json").string(), "--q", "1.5", "--out", dir.string()}, &err) != 0);
    CHECK(run({"--config", (dir / "ok.json").string(), "--prune", "sometimes"}, &err) != 0);
    CHECK(run({"--config", (dir / "ok.json").string(), "--q", "0"}, &err) != 0);
  }

  TEST_CASE("select matches a direct library call") {
    const auto dir = scratch("select");
    auto rng = substream(2, "cli");
    const auto labeled = testing::random_labeled(rng, 40, 2, false);
    std::vector<TestSample> test;
    for (const auto& s : testing::random_labeled(rng, 8, 2, false)) test.push_back({s.x, 0.0, std::nullopt});
    {
      std::ofstream l(dir / "labeled.csv");
      write_labeled_csv(l, labeled);
      std::ofstream t(dir / "test.csv");
      write_test_csv(t, test);
    }
    nlohmann::json doc{{"command", "select"},
                       {"split", {{"n1", 15}}},
                       {"labeled_csv", (dir / "labeled.csv").string()},
                       {"test_csv", (dir / "test.csv").string()},
                       {"q", 0.4},
                       {"seed", 8},
                       {"procedures",
                        {{{"name", "scs"},
                          {"kind", "scs"},
                          {"candidates", {{{"trainer", {{"family", "ridge"}}}}}}}}}};
    spit(dir / "select.json", doc.dump());
    REQUIRE(run({"--config", (dir / "select.json").string(), "--out", (dir / "out").string()}) == 0);

    const auto problem = validate_problem(labeled, test, {15, 25, 8});
    TrainerSpec ridge;
    ridge.family = TrainerFamily::ridge;
    const ScoreFunction fn({ScoreKind::clipped_mean, 100.0, std::nullopt},
                           train(ridge, problem.preparatory()));
    const auto expected = run_scs(problem, fn, 0.4);
    const auto summary = nlohmann::json::parse(slurp(dir / "out" / "summary.json"));
    const auto& sel = summary["selections"][0];
    CHECK(sel["pvalues"].get<std::vector<double>>() == expected.pvalues);
    std::vector<std::size_t> one_based;
    for (auto j : expected.selected) one_based.push_back(j + 1);
    CHECK(sel["selected"].get<std::vector<std::size_t>>() == one_based);
    CHECK(slurp(dir / "out" / "results.csv").starts_with(
        "procedure,q,test_index,pvalue,aux_size,xi,model,selected\n"));

    spit(dir / "empty.csv", "x_1,x_2,c\n");
    doc["test_csv"] = (dir / "empty.csv").string();
    spit(dir / "select_empty.json", doc.dump());
    std::string err;
    CHECK(run({"--config", (dir / "select_empty.json").string(), "--out", dir.string()}, &err) != 0);
    CHECK(err.find("test set has no rows") != std::string::npos);

    doc["test_csv"] = (dir / "test.csv").string();
    doc["split"]["n1"] = 40;
    spit(dir / "select_n2.json", doc.dump());
    CHECK(run({"--config", (dir / "select_n2.json").string(), "--out", dir.string()}, &err) != 0);
    CHECK(err.find("n2 too small") != std::string::npos);
  }
}
