#include <doctest.h>

#include <limits>

#include "optcs/core.hpp"
#include "testing.hpp"

using namespace optcs;
using optcs::testing::throws_containing;

TEST_SUITE("core") {
  TEST_CASE("validate_problem partitions the labeled block") {
    auto rng = substream(1, "core");
    auto labeled = testing::random_labeled(rng, 10, 2, false);
    std::vector<TestSample> test(3, TestSample{{0.0, 1.0}, 0.0, std::nullopt});
    const auto p = validate_problem(labeled, test, {4, 6, 3});
    CHECK(p.preparatory().size() == 4);
    CHECK(p.calibration().size() == 6);
    CHECK(p.test().size() == 3);
    CHECK(p.dim() == 2);
    CHECK(p.calibration()[0].y == labeled[4].y);
  }

  TEST_CASE("validate_problem rejects malformed input") {
    auto rng = substream(2, "core");
    auto labeled = testing::random_labeled(rng, 4, 2, false);
    std::vector<TestSample> test(1, TestSample{{0.0, 1.0}, 0.0, std::nullopt});
    CHECK(throws_containing([&] { validate_problem(labeled, test, {4, 0, 1}); },
                            "empty calibration set"));
    CHECK(throws_containing([&] { validate_problem(labeled, {}, {0, 4, 0}); }, "empty test set"));
    CHECK(throws_containing([&] { validate_problem(labeled, test, {0, 3, 1}); }, "count"));

    auto mixed = labeled;
    mixed[2].x.push_back(0.5);
    CHECK(throws_containing([&] { validate_problem(mixed, test, {0, 4, 1}); },
                            "dimension mismatch"));

    auto bad_test = test;
    bad_test[0].x = {1.0};
    CHECK(throws_containing([&] { validate_problem(labeled, bad_test, {0, 4, 1}); },
                            "dimension mismatch"));

    auto nan = labeled;
    nan[1].y = std::numeric_limits<double>::quiet_NaN();
    CHECK(throws_containing([&] { validate_problem(nan, test, {0, 4, 1}); }, "non-finite"));
    auto inf = test;
    inf[0].c = std::numeric_limits<double>::infinity();
    CHECK(throws_containing([&] { validate_problem(labeled, inf, {0, 4, 1}); }, "non-finite"));
  }

  TEST_CASE("repartition and ground-truth erasure keep sample order") {
    auto rng = substream(3, "core");
    const auto p = testing::random_problem(rng, {2, 5, 3}, 3, false);
    CHECK(p.has_ground_truth());
    const auto q = p.with_n1(4);
    CHECK(q.split().n1 == 4);
    CHECK(q.split().n2 == 3);
    CHECK(q.calibration()[0].y == p.labeled()[4].y);
    CHECK_THROWS_AS(p.with_n1(7), Error);
    const auto blind = p.without_ground_truth();
    CHECK_FALSE(blind.has_ground_truth());
    for (std::size_t j = 0; j < 3; ++j) CHECK(blind.test()[j].x == p.test()[j].x);
  }

  TEST_CASE("score matrix layout") {
    const std::vector<double> shared{1.0, 2.0, 3.0, 4.0, 5.0};
    const auto mat = ScoreMatrix::broadcast(shared, 2, 3);
    CHECK(mat.rows() == 2);
    CHECK(mat.cols() == 5);
    CHECK(mat.calibration(1).size() == 3);
    CHECK(mat.tests(1)[1] == 5.0);
    CHECK(mat.row(0)[0] == mat.row(1)[0]);
    CHECK_THROWS_AS(ScoreMatrix::broadcast(shared, 3, 3), Error);
  }

  TEST_CASE("enum names round trip") {
    for (auto k : {ScoreKind::clipped_mean, ScoreKind::clipped_studentized,
                   ScoreKind::clipped_quantile}) {
      CHECK(parse_score_kind(to_string(k)) == k);
    }
    for (auto m : {PruneMode::hete, PruneMode::homo, PruneMode::dtm}) {
      CHECK(parse_prune_mode(to_string(m)) == m);
    }
    CHECK_THROWS_AS(parse_prune_mode("sometimes"), Error);
  }

  TEST_CASE("score config validation") {
    ScoreConfig c;
    CHECK_NOTHROW(c.validate());
    c.big_m = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {ScoreKind::clipped_quantile, 100.0, std::nullopt};
    CHECK_THROWS_AS(c.validate(), Error);
    c.quantile_level = 0.3;
    CHECK_NOTHROW(c.validate());
    c.quantile_level = 1.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {ScoreKind::clipped_mean, 100.0, 0.5};
    CHECK_THROWS_AS(c.validate(), Error);
  }

  TEST_CASE("level check") {
    CHECK_NOTHROW(check_level(0.3));
    CHECK_THROWS_AS(check_level(0.0), Error);
    CHECK_THROWS_AS(check_level(1.0), Error);
    CHECK_THROWS_AS(check_level(std::numeric_limits<double>::quiet_NaN()), Error);
  }
}
