#include <doctest.h>

#include <map>

#include "optcs/models.hpp"
#include "testing.hpp"

using namespace optcs;
using optcs::testing::throws_containing;

namespace {

std::vector<LabeledSample> from_xy(const std::vector<std::pair<double, double>>& pts) {
  std::vector<LabeledSample> out;
  for (auto [x, y] : pts) out.push_back({{x}, y, 0.0});
  return out;
}

std::vector<LabeledSample> constant_design(const std::vector<double>& ys) {
  std::vector<LabeledSample> out;
  for (double y : ys) out.push_back({{}, y, 0.0});
  return out;
}

std::map<double, int> label_counts(const std::vector<LabeledSample>& data) {
  std::map<double, int> out;
  for (const auto& s : data) ++out[s.y];
  return out;
}

std::vector<TrainerSpec> deterministic_families() {
  std::vector<TrainerSpec> specs(6);
  specs[0].family = TrainerFamily::constant_mean;
  specs[1].family = TrainerFamily::ridge;
  specs[1].ridge_lambda = 0.5;
  specs[1].fit_spread = true;
  specs[2].family = TrainerFamily::linear_quantile;
  specs[2].quantile_level = 0.3;
  specs[2].gd_steps = 30;
  specs[3].family = TrainerFamily::knn;
  specs[3].knn_k = 3;
  specs[4].family = TrainerFamily::shuffled_wrapper;
  specs[4].seed = 11;
  specs[4].gd_steps = 5;
  specs[5].family = TrainerFamily::ridge;
  specs[5].features = {1};
  return specs;
}

}  // namespace

TEST_SUITE("models") {
  TEST_CASE("constant_mean predicts the sample mean") {
    TrainerSpec spec;
    const auto model = train(spec, from_xy({{0, 0}, {1, 1}, {2, 1}}));
    const std::vector<double> probe{5.0};
    CHECK(model.predict_mean(probe) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  }

  TEST_CASE("ridge without penalty interpolates two points") {
    TrainerSpec spec;
    spec.family = TrainerFamily::ridge;
    spec.ridge_lambda = 0.0;
    const auto model = train(spec, from_xy({{0, 0}, {1, 1}}));
    for (double x : {-2.0, 0.25, 3.0}) {
      const std::vector<double> probe{x};
      CHECK(model.predict_mean(probe) == doctest::Approx(x).epsilon(1e-12));
    }
  }

  TEST_CASE("ridge with a rank-deficient design asks for a penalty") {
    TrainerSpec spec;
    spec.family = TrainerFamily::ridge;
    spec.ridge_lambda = 0.0;
    CHECK(throws_containing([&] { train(spec, from_xy({{1, 0}, {1, 1}, {1, 2}})); },
                            "ridge_lambda > 0"));
    spec.ridge_lambda = 1.0;
    CHECK_NOTHROW(train(spec, from_xy({{1, 0}, {1, 1}, {1, 2}})));
  }

  TEST_CASE("ridge penalty shrinks the slope but not the intercept") {
    // Closed form for centred 1-D data: slope = Sxy / (Sxx + lambda).
    TrainerSpec spec;
    spec.family = TrainerFamily::ridge;
    spec.ridge_lambda = 2.0;
    const auto model = train(spec, from_xy({{-1, -2}, {0, 1}, {1, 4}}));
    const double slope = 6.0 / (2.0 + 2.0);
    const std::vector<double> at0{0.0}, at1{1.0};
    CHECK(model.predict_mean(at0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(model.predict_mean(at1) == doctest::Approx(1.0 + slope).epsilon(1e-12));
  }

  TEST_CASE("training errors") {
    TrainerSpec spec;
    CHECK(throws_containing([&] { train(spec, {}); }, "empty"));
    spec.family = TrainerFamily::knn;
    spec.knn_k = 0;
    CHECK_THROWS_AS(spec.validate(), Error);
    spec = {};
    spec.family = TrainerFamily::shuffled_wrapper;
    CHECK_THROWS_AS(spec.validate(), Error);
    spec = {};
    spec.ridge_lambda = -1.0;
    CHECK_THROWS_AS(spec.validate(), Error);
    spec = {};
    spec.family = TrainerFamily::linear_quantile;
    spec.quantile_level = 1.5;
    CHECK_THROWS_AS(spec.validate(), Error);
    spec = {};
    spec.features = {3};
    CHECK_THROWS_AS(train(spec, from_xy({{0, 0}})), Error);
  }

  TEST_CASE("linear_quantile matches a pinball grid-search oracle") {
    auto check_against_grid = [](const std::vector<double>& ys, double level) {
      TrainerSpec spec;
      spec.family = TrainerFamily::linear_quantile;
      spec.quantile_level = level;
      const auto model = train(spec, constant_design(ys));
      const double fitted = model.predict_quantile(std::vector<double>{});
      auto loss = [&](double t) {
        double s = 0.0;
        for (double y : ys) s += pinball_loss(y - t, level);
        return s / static_cast<double>(ys.size());
      };
      const double lo = *std::min_element(ys.begin(), ys.end());
      const double hi = *std::max_element(ys.begin(), ys.end());
      double best = loss(lo);
      for (int i = 0; i <= 200000; ++i) best = std::min(best, loss(lo + (hi - lo) * i / 200000.0));
      for (double y : ys) best = std::min(best, loss(y));
      CHECK(loss(fitted) <= best + 1e-6);
      return fitted;
    };
    CHECK(check_against_grid({0.0, 0.0, 10.0}, 0.5) == doctest::Approx(0.0).epsilon(1e-6));
    auto rng = substream(5, "quantile");
    std::normal_distribution<double> normal;
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> ys(7 + rep);
      for (auto& y : ys) y = normal(rng);
      check_against_grid(ys, 0.1 + 0.04 * rep);
    }
  }

  TEST_CASE("linear_quantile exposes its level and a mean predictor") {
    TrainerSpec spec;
    spec.family = TrainerFamily::linear_quantile;
    spec.quantile_level = 0.9;
    const auto model = train(spec, from_xy({{0, 0}, {1, 2}, {2, 1}, {3, 5}}));
    CHECK(model.has_quantile());
    REQUIRE(model.quantile_level());
    CHECK(*model.quantile_level() == 0.9);
    const std::vector<double> probe{1.5};
    CHECK(model.predict_mean(probe) == model.predict_quantile(probe));
  }

  TEST_CASE("knn averages over neighbours tied at the k-th distance") {
    TrainerSpec spec;
    spec.family = TrainerFamily::knn;
    spec.knn_k = 1;
    const auto model = train(spec, from_xy({{0, 0}, {2, 1}, {-2, 3}}));
    CHECK(model.predict_mean(std::vector<double>{1.0}) == doctest::Approx(0.5));
    CHECK(model.predict_mean(std::vector<double>{-1.5}) == doctest::Approx(3.0));
    spec.knn_k = 2;
    const auto two = train(spec, from_xy({{0, 0}, {2, 1}, {-2, 3}}));
    // nearest is 0 (y=0); 2 and -2 tie for second place and split its weight.
    CHECK(two.predict_mean(std::vector<double>{0.0}) == doctest::Approx((0.0 + 2.0) / 2.0));
  }

  TEST_CASE("spread model is positive and floored") {
    TrainerSpec spec;
    spec.family = TrainerFamily::ridge;
    spec.fit_spread = true;
    spec.spread_floor = 0.25;
    const auto model = train(spec, from_xy({{0, 0}, {1, 1}, {2, 2}, {3, 3}}));
    REQUIRE(model.has_spread());
    for (double x : {-10.0, 0.0, 1.5, 10.0}) {
      CHECK(model.predict_spread(std::vector<double>{x}) >= 0.25);
    }
    TrainerSpec plain;
    const auto no_spread = train(plain, from_xy({{0, 0}}));
    CHECK_FALSE(no_spread.has_spread());
    CHECK_THROWS_AS(no_spread.predict_spread(std::vector<double>{0.0}), Error);
    CHECK_THROWS_AS(no_spread.predict_quantile(std::vector<double>{0.0}), Error);
  }

  TEST_CASE("every family is exactly permutation invariant") {
    auto rng = substream(6, "symmetry");
    for (const auto& spec : deterministic_families()) {
      for (int rep = 0; rep < 100; ++rep) {
        auto data = testing::random_labeled(rng, 8 + rep % 7, 2, rep % 2 == 0, rep % 3 == 0);
        auto shuffled = data;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const auto a = train(spec, data);
        const auto b = train(spec, shuffled);
        for (int k = 0; k < 5; ++k) {
          const auto probe = testing::random_x(rng, 2, false);
          REQUIRE(a.predict_mean(probe) == b.predict_mean(probe));
          if (a.has_quantile()) REQUIRE(a.predict_quantile(probe) == b.predict_quantile(probe));
          if (a.has_spread()) REQUIRE(a.predict_spread(probe) == b.predict_spread(probe));
        }
      }
    }
  }

  TEST_CASE("shuffled_wrapper depends on its seed, not on input order") {
    auto rng = substream(7, "wrapper");
    const auto data = testing::random_labeled(rng, 30, 2, false);
    TrainerSpec spec;
    spec.family = TrainerFamily::shuffled_wrapper;
    spec.gd_steps = 3;
    spec.gd_rate = 0.05;
    spec.seed = 1;
    const auto a = train(spec, data);
    spec.seed = 2;
    const auto b = train(spec, data);
    const std::vector<double> probe{0.3, -0.7};
    CHECK(a.predict_mean(probe) != b.predict_mean(probe));
  }

  TEST_CASE("feature subsets restrict the design") {
    TrainerSpec spec;
    spec.family = TrainerFamily::ridge;
    spec.ridge_lambda = 0.0;
    spec.features = {1};
    std::vector<LabeledSample> data{{{5, 0}, 0, 0}, {{-3, 1}, 1, 0}, {{7, 2}, 2, 0}};
    const auto model = train(spec, data);
    CHECK(model.predict_mean(std::vector<double>{100.0, 0.5}) == doctest::Approx(0.5));

    TrainerSpec random;
    random.random_features = 3;
    const auto r1 = resolve_features(random, 10, 42, 0);
    const auto r2 = resolve_features(random, 10, 42, 0);
    const auto r3 = resolve_features(random, 10, 42, 1);
    CHECK(r1.features.size() == 3);
    CHECK(r1.features == r2.features);
    CHECK(std::is_sorted(r1.features.begin(), r1.features.end()));
    CHECK(r1.random_features == 0);
    random.feature_key = 0;
    CHECK(resolve_features(random, 10, 42, 1).features == r1.features);
    CHECK_THROWS_AS(resolve_features(TrainerSpec{.random_features = 11}, 10, 1, 0), Error);
    (void)r3;
  }

  TEST_CASE("oversample_balance worked examples") {
    auto make = [](int zeros, int ones) {
      std::vector<LabeledSample> out;
      for (int i = 0; i < zeros; ++i) out.push_back({{double(i)}, 0.0, 0.0});
      for (int i = 0; i < ones; ++i) out.push_back({{double(100 + i)}, 1.0, 0.0});
      return out;
    };
    CHECK(label_counts(oversample_balance(make(6, 2))) == std::map<double, int>{{0.0, 6}, {1.0, 6}});
    CHECK(label_counts(oversample_balance(make(5, 5))) == std::map<double, int>{{0.0, 5}, {1.0, 5}});
    const auto seven_three = oversample_balance(make(7, 3));
    CHECK(label_counts(seven_three) == std::map<double, int>{{0.0, 7}, {1.0, 7}});
    // Each positive gains one copy; the first in canonical order gains two.
    std::map<double, int> copies;
    for (const auto& s : seven_three) {
      if (s.y == 1.0) ++copies[s.x[0]];
    }
    CHECK(copies == std::map<double, int>{{100.0, 3}, {101.0, 2}, {102.0, 2}});
    CHECK(oversample_balance(make(4, 0)).size() == 4);
    auto bad = make(2, 2);
    bad[0].y = 0.5;
    CHECK_THROWS_AS(oversample_balance(bad), Error);
  }

  TEST_CASE("oversample_balance is multiset invariant under permutation") {
    auto rng = substream(8, "oversample");
    for (int rep = 0; rep < 50; ++rep) {
      auto data = testing::random_labeled(rng, 5 + rep % 9, 1, true, rep % 2 == 0);
      auto shuffled = data;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      CHECK(canonical_order(oversample_balance(data)) ==
            canonical_order(oversample_balance(shuffled)));
    }
  }

  TEST_CASE("pinball loss") {
    CHECK(pinball_loss(2.0, 0.3) == doctest::Approx(0.6));
    CHECK(pinball_loss(-2.0, 0.3) == doctest::Approx(1.4));
    CHECK(pinball_loss(0.0, 0.3) == 0.0);
  }

  TEST_CASE("trainer family names round trip") {
    for (auto f : {TrainerFamily::constant_mean, TrainerFamily::ridge,
                   TrainerFamily::linear_quantile, TrainerFamily::knn,
                   TrainerFamily::shuffled_wrapper}) {
      CHECK(parse_trainer_family(to_string(f)) == f);
    }
    CHECK_THROWS_AS(parse_trainer_family("forest"), Error);
  }
}
