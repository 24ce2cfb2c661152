#pragma once

// Symmetric training algorithms. Every deterministic family here satisfies
//   train(spec, data) == train(spec, pi(data))   (bit-for-bit)
// for any permutation pi, which is what leave-one-out procedures need.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "optcs/core.hpp"

namespace optcs {

class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual double operator()(std::span<const double> x) const = 0;
};

// Prediction bundle. The mean predictor is always present; quantile and
// spread predictors are optional. All predictions are deterministic.
class FittedModel {
 public:
  explicit FittedModel(std::shared_ptr<const Predictor> mean,
                       std::shared_ptr<const Predictor> quantile = nullptr,
                       std::optional<double> quantile_level = std::nullopt,
                       std::shared_ptr<const Predictor> spread = nullptr);

  double predict_mean(std::span<const double> x) const { return (*mean_)(x); }

  bool has_quantile() const { return quantile_ != nullptr; }
  std::optional<double> quantile_level() const { return quantile_level_; }
  double predict_quantile(std::span<const double> x) const;

  bool has_spread() const { return spread_ != nullptr; }
  double predict_spread(std::span<const double> x) const;

 private:
  std::shared_ptr<const Predictor> mean_;
  std::shared_ptr<const Predictor> quantile_;
  std::optional<double> quantile_level_;
  std::shared_ptr<const Predictor> spread_;
};

// Model that predicts `value` everywhere (optionally also as quantile/spread).
FittedModel constant_model(double value, std::optional<double> spread = std::nullopt);

enum class TrainerFamily { constant_mean, ridge, linear_quantile, knn, shuffled_wrapper };

std::string_view to_string(TrainerFamily family);
TrainerFamily parse_trainer_family(std::string_view name);

struct TrainerSpec {
  TrainerFamily family = TrainerFamily::constant_mean;

  double ridge_lambda = 1.0;    // ridge, spread model; >= 0, intercept unpenalized
  double quantile_level = 0.5;  // linear_quantile
  int knn_k = 5;                // knn
  int gd_steps = 100;           // IRLS iterations (linear_quantile), SGD epochs (shuffled_wrapper)
  double gd_rate = 0.01;        // SGD step size (shuffled_wrapper)

  // Fit sigma(x) as a ridge regression of |y - mu(x)| on x, floored at spread_floor.
  bool fit_spread = false;
  double spread_floor = 1e-2;

  // Columns used by the model; empty means all. `random_features > 0`
  // requests a subset drawn per run (see resolve_features); candidates
  // sharing a `feature_key` share the drawn subset.
  std::vector<std::size_t> features;
  std::size_t random_features = 0;
  std::optional<std::uint64_t> feature_key;

  std::optional<std::uint64_t> seed;  // shuffled_wrapper only

  void validate() const;
};

// Draws the random feature subset if requested; otherwise returns spec.
TrainerSpec resolve_features(TrainerSpec spec, std::size_t dim, std::uint64_t seed,
                             std::uint64_t default_key);

// Throws Error on empty data, invalid hyperparameters, or singular normal
// equations (ridge with lambda = 0 and a rank-deficient design).
FittedModel train(const TrainerSpec& spec, std::span<const LabeledSample> data);

using Trainer = std::function<FittedModel(std::span<const LabeledSample>)>;

Trainer make_trainer(TrainerSpec spec);

// Duplicates minority-class samples of 0/1-labeled data until the classes
// are balanced. Returns the input unchanged if a class is empty.
std::vector<LabeledSample> oversample_balance(std::span<const LabeledSample> data);

// Sorts samples by (x, y, c) lexicographically. Permutations of equal
// multisets map to identical sequences.
std::vector<LabeledSample> canonical_order(std::span<const LabeledSample> data);
bool canonical_less(const LabeledSample& a, const LabeledSample& b);

double pinball_loss(double residual, double level);

}  // namespace optcs
