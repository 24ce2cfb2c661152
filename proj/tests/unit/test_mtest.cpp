#include <doctest.h>

#include "optcs/mtest.hpp"
#include "testing.hpp"

using namespace optcs;

TEST_SUITE("mtest") {
  TEST_CASE("BH worked examples") {
    CHECK(bh(std::vector<double>{0.01, 0.02, 0.5}, 0.1) == std::vector<std::size_t>{0, 1});
    CHECK(bh_rstar(std::vector<double>{0.01, 0.02, 0.5}, 0.1) == 2);
    CHECK(bh(std::vector<double>{1.0, 1.0, 1.0}, 0.9).empty());
    CHECK(bh(std::vector<double>{0.0, 0.0}, 0.1) == std::vector<std::size_t>{0, 1});
    CHECK(bh(std::vector<double>{}, 0.1).empty());
    CHECK_THROWS_AS(bh(std::vector<double>{0.1}, 1.5), Error);
  }

  TEST_CASE("BH agrees with r-enumeration and is self-consistent") {
    auto rng = substream(1, "mtest");
    for (int rep = 0; rep < 500; ++rep) {
      const std::size_t m = 1 + rep % 20;
      std::vector<double> p(m);
      for (auto& v : p) v = rep % 3 == 0 ? std::round(uniform01(rng) * 8.0) / 8.0 : uniform01(rng) * 0.3;
      const double q = 0.1 * (1 + rep % 5);
      const auto sel = bh(p, q);
      REQUIRE(sel == testing::brute_force_bh(p, q));
      REQUIRE(bh_rstar(p, q) == sel.size());
    }
  }

  TEST_CASE("selection step worked example") {
    const std::vector<double> p{0.01, 0.02, 0.9};
    const std::vector<double> aux{2, 2, 5};
    const auto out = optcs_select(p, aux, 0.3, PruneMode::dtm, 0);
    CHECK(out.r_star == 2);
    CHECK(out.selected == std::vector<std::size_t>{0, 1});
    CHECK(out.xi == std::vector<double>{1, 1, 1});

    const std::vector<double> ones{1, 1, 1};
    for (auto mode : {PruneMode::hete, PruneMode::homo, PruneMode::dtm}) {
      const auto none = optcs_select(ones, aux, 0.3, mode, 3);
      CHECK(none.selected.empty());
      CHECK(none.r_star == 0);
    }
  }

  TEST_CASE("selection step validates inputs") {
    const std::vector<double> p{0.1, 0.2};
    CHECK_THROWS_AS(optcs_select(p, std::vector<double>{1.0}, 0.2, PruneMode::dtm, 0), Error);
    CHECK_THROWS_AS(optcs_select(p, std::vector<double>{1.0, -1.0}, 0.2, PruneMode::dtm, 0), Error);
    CHECK_THROWS_AS(optcs_select(p, std::vector<double>{1.0, 1.0}, 0.0, PruneMode::dtm, 0), Error);
  }

  TEST_CASE("pruning variables") {
    const auto hete = draw_xi(PruneMode::hete, 6, 9);
    const auto homo = draw_xi(PruneMode::homo, 6, 9);
    const auto dtm = draw_xi(PruneMode::dtm, 6, 9);
    CHECK(hete == draw_xi(PruneMode::hete, 6, 9));
    for (double v : hete) CHECK((v >= 0.0 && v <= 1.0));
    CHECK(hete[0] != hete[1]);
    for (double v : homo) CHECK(v == homo[0]);
    for (double v : dtm) CHECK(v == 1.0);
  }

  TEST_CASE("selection step matches brute force and keeps its invariants") {
    auto rng = substream(2, "mtest");
    for (int rep = 0; rep < 500; ++rep) {
      const std::size_t m = 1 + rep % 20;
      std::vector<double> p(m), aux(m);
      for (auto& v : p) v = uniform01(rng) * 0.4;
      for (auto& v : aux) v = std::floor(uniform01(rng) * static_cast<double>(m + 1));
      const double q = 0.1 * (1 + rep % 5);
      for (auto mode : {PruneMode::hete, PruneMode::homo, PruneMode::dtm}) {
        const auto out = optcs_select(p, aux, q, mode, rep);
        REQUIRE(out.selected == testing::brute_force_select(p, aux, q, out.xi));
        REQUIRE(out.selected.size() == out.r_star);
        for (auto j : out.selected) REQUIRE(p[j] <= q * aux[j] / static_cast<double>(m));
        if (mode == PruneMode::dtm) REQUIRE(testing::is_subset(out.selected, bh(p, q)));
      }
      std::vector<double> shared(m), ones(m, 1.0);
      for (auto& v : shared) v = uniform01(rng);
      const std::vector<double> homo(m, shared[0]);
      const auto dtm = optcs_select_with_xi(p, aux, q, ones).selected;
      REQUIRE(testing::is_subset(dtm, optcs_select_with_xi(p, aux, q, shared).selected));
      REQUIRE(testing::is_subset(dtm, optcs_select_with_xi(p, aux, q, homo).selected));
    }
  }

  TEST_CASE("random pruning can select outside BH when aux sizes exceed the BH count") {
    const std::vector<double> p{0.15, 0.9};
    const std::vector<double> aux{2, 0};
    CHECK(bh(p, 0.2).empty());
    const auto out = optcs_select_with_xi(p, aux, 0.2, std::vector<double>{0.4, 0.4});
    CHECK(out.selected == std::vector<std::size_t>{0});
    CHECK(optcs_select_with_xi(p, aux, 0.2, std::vector<double>{1.0, 1.0}).selected.empty());
  }

  TEST_CASE("FDR decomposition bound") {
    const std::vector<double> p{0.01, 0.9};
    const std::vector<double> aux{2, 2};
    CHECK(fdr_decomposition_bound(p, aux, {true, false}, 0.3) == 0.5);
    CHECK(fdr_decomposition_bound(p, aux, {false, false}, 0.3) == 0.0);
    CHECK(fdr_decomposition_bound(std::vector<double>{1, 1}, aux, {true, true}, 0.3) == 0.0);
    CHECK(fdr_decomposition_bound(std::vector<double>{0.0, 0.0}, std::vector<double>{0, 1},
                                  {true, true}, 0.3) == 1.0);
  }
}
