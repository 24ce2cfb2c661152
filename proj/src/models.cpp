#include "optcs/models.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "optcs/rng.hpp"

namespace optcs {

namespace {

using Rows = std::vector<const LabeledSample*>;

Rows canonical_rows(std::span<const LabeledSample> data) {
  Rows rows(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) rows[i] = &data[i];
  std::sort(rows.begin(), rows.end(),
            [](const LabeledSample* a, const LabeledSample* b) { return canonical_less(*a, *b); });
  return rows;
}

std::vector<std::size_t> resolve_columns(const TrainerSpec& spec, std::size_t dim) {
  if (spec.features.empty()) {
    std::vector<std::size_t> all(dim);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return all;
  }
  for (std::size_t col : spec.features) {
    if (col >= dim) throw Error("feature index " + std::to_string(col) + " out of range");
  }
  return spec.features;
}

class ConstantPredictor final : public Predictor {
 public:
  explicit ConstantPredictor(double value) : value_(value) {}
  double operator()(std::span<const double>) const override { return value_; }

 private:
  double value_;
};

class LinearPredictor final : public Predictor {
 public:
  LinearPredictor(double intercept, std::vector<double> coef, std::vector<std::size_t> cols)
      : intercept_(intercept), coef_(std::move(coef)), cols_(std::move(cols)) {}

  double operator()(std::span<const double> x) const override {
    double out = intercept_;
    for (std::size_t k = 0; k < cols_.size(); ++k) out += coef_[k] * x[cols_[k]];
    return out;
  }

 private:
  double intercept_;
  std::vector<double> coef_;
  std::vector<std::size_t> cols_;
};

class FlooredPredictor final : public Predictor {
 public:
  FlooredPredictor(std::shared_ptr<const Predictor> inner, double floor)
      : inner_(std::move(inner)), floor_(floor) {}
  double operator()(std::span<const double> x) const override {
    return std::max((*inner_)(x), floor_);
  }

 private:
  std::shared_ptr<const Predictor> inner_;
  double floor_;
};

// k nearest neighbours under Euclidean distance. Neighbours tied at the
// k-th distance share the remaining weight equally, so the prediction does
// not depend on storage order.
class KnnPredictor final : public Predictor {
 public:
  KnnPredictor(const Rows& rows, std::vector<std::size_t> cols, std::size_t k)
      : cols_(std::move(cols)), k_(std::min(k, rows.size())) {
    x_.reserve(rows.size() * cols_.size());
    y_.reserve(rows.size());
    for (const auto* r : rows) {
      for (std::size_t col : cols_) x_.push_back(r->x[col]);
      y_.push_back(r->y);
    }
  }

  double operator()(std::span<const double> x) const override {
    const std::size_t n = y_.size();
    const std::size_t p = cols_.size();
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < p; ++k) {
        const double diff = x_[i * p + k] - x[cols_[k]];
        s += diff * diff;
      }
      dist[i] = s;
    }
    std::vector<double> sorted = dist;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k_ - 1),
                     sorted.end());
    const double kth = sorted[k_ - 1];

    double below = 0.0, tied = 0.0;
    std::size_t n_below = 0, n_tied = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (dist[i] < kth) {
        below += y_[i];
        ++n_below;
      } else if (dist[i] == kth) {
        tied += y_[i];
        ++n_tied;
      }
    }
    const double remaining = static_cast<double>(k_ - n_below);
    return (below + remaining * (tied / static_cast<double>(n_tied))) / static_cast<double>(k_);
  }

 private:
  std::vector<std::size_t> cols_;
  std::size_t k_;
  std::vector<double> x_;
  std::vector<double> y_;
};

Eigen::MatrixXd design_matrix(const Rows& rows, const std::vector<std::size_t>& cols) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(cols.size() + 1));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    X(r, 0) = 1.0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      X(r, static_cast<Eigen::Index>(k + 1)) = rows[i]->x[cols[k]];
    }
  }
  return X;
}

std::shared_ptr<const Predictor> linear_from(const Eigen::VectorXd& beta,
                                             std::vector<std::size_t> cols) {
  std::vector<double> coef(beta.data() + 1, beta.data() + beta.size());
  return std::make_shared<LinearPredictor>(beta(0), std::move(coef), std::move(cols));
}

// Solves (X'WX + lambda*P) beta = X'Wy, P = diag(0, 1, ..., 1).
Eigen::VectorXd solve_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            const Eigen::VectorXd* weights, double lambda) {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  if (weights) {
    A = X.transpose() * weights->asDiagonal() * X;
    b = X.transpose() * weights->cwiseProduct(y);
  } else {
    A = X.transpose() * X;
    b = X.transpose() * y;
  }
  for (Eigen::Index k = 1; k < A.rows(); ++k) A(k, k) += lambda;

  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  const Eigen::VectorXd diag = ldlt.vectorD().cwiseAbs();
  if (ldlt.info() != Eigen::Success || diag.minCoeff() <= 1e-12 * std::max(1.0, diag.maxCoeff())) {
    throw Error("singular normal equations; use ridge_lambda > 0");
  }
  return ldlt.solve(b);
}

Eigen::VectorXd response(const Rows& rows) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) y(static_cast<Eigen::Index>(i)) = rows[i]->y;
  return y;
}

std::shared_ptr<const Predictor> fit_ridge(const Rows& rows, const std::vector<std::size_t>& cols,
                                           double lambda) {
  const Eigen::MatrixXd X = design_matrix(rows, cols);
  return linear_from(solve_ridge(X, response(rows), nullptr, lambda), cols);
}

double mean_pinball(const Eigen::VectorXd& residual, double level) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < residual.size(); ++i) s += pinball_loss(residual(i), level);
  return s / static_cast<double>(residual.size());
}

// Pinball minimizers sit at vertices interpolating p = cols + 1 samples.
// Starting from the p samples closest to the IRLS fit, exchange one basis
// sample for one of the nearest outside samples while the loss drops.
Eigen::VectorXd polish_vertex(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double level,
                              Eigen::VectorXd beta, double loss) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (n < p) return beta;
  auto nearest = [&](const Eigen::VectorXd& b) {
    const Eigen::VectorXd r = (y - X * b).cwiseAbs();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index c) { return r(a) < r(c); });
    return order;
  };
  auto interpolate = [&](const std::vector<Eigen::Index>& basis, Eigen::VectorXd& out) {
    Eigen::MatrixXd A(p, p);
    Eigen::VectorXd b(p);
    for (Eigen::Index k = 0; k < p; ++k) {
      A.row(k) = X.row(basis[static_cast<std::size_t>(k)]);
      b(k) = y(basis[static_cast<std::size_t>(k)]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) return false;
    out = lu.solve(b);
    return true;
  };

  auto order = nearest(beta);
  std::vector<Eigen::Index> basis(order.begin(), order.begin() + p);
  Eigen::VectorXd trial;
  if (interpolate(basis, trial)) {
    const double l = mean_pinball(y - X * trial, level);
    if (l < loss) {
      loss = l;
      beta = trial;
    }
  }
  const Eigen::Index pool = std::min<Eigen::Index>(n, 3 * p + 2);
  for (int round = 0; round < 200; ++round) {
    order = nearest(beta);
    std::vector<Eigen::Index> current(order.begin(), order.begin() + p);
    double best_loss = loss;
    Eigen::VectorXd best_beta;
    for (Eigen::Index in = p; in < pool; ++in) {
      for (Eigen::Index out = 0; out < p; ++out) {
        auto swapped = current;
        swapped[static_cast<std::size_t>(out)] = order[static_cast<std::size_t>(in)];
        if (!interpolate(swapped, trial)) continue;
        const double l = mean_pinball(y - X * trial, level);
        if (l < best_loss) {
          best_loss = l;
          best_beta = trial;
        }
      }
    }
    if (best_beta.size() == 0) break;
    loss = best_loss;
    beta = best_beta;
  }
  return beta;
}

// Linear quantile regression by iteratively reweighted least squares: each
// step minimizes the quadratic majorizer of the pinball loss at the current
// residuals. The best iterate (by exact pinball loss) is returned.
std::shared_ptr<const Predictor> fit_linear_quantile(const Rows& rows,
                                                     const std::vector<std::size_t>& cols,
                                                     double level, int max_iter) {
  const Eigen::MatrixXd X = design_matrix(rows, cols);
  const Eigen::VectorXd y = response(rows);
  const double ridge = 1e-10;
  const double eps = 1e-10 * (1.0 + y.cwiseAbs().maxCoeff());

  Eigen::VectorXd beta = solve_ridge(X, y, nullptr, ridge);
  Eigen::VectorXd best = beta;
  double best_loss = mean_pinball(y - X * beta, level);
  double prev_loss = best_loss;

  Eigen::VectorXd w(y.size());
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd r = y - X * beta;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      const double side = r(i) >= 0.0 ? level : 1.0 - level;
      w(i) = side / std::max(std::abs(r(i)), eps);
    }
    try {
      beta = solve_ridge(X, y, &w, ridge * w.maxCoeff());
    } catch (const Error&) {
      break;
    }
    const double loss = mean_pinball(y - X * beta, level);
    if (loss < best_loss) {
      best_loss = loss;
      best = beta;
    }
    if (std::abs(prev_loss - loss) <= 1e-15 * (1.0 + loss)) break;
    prev_loss = loss;
  }
  return linear_from(polish_vertex(X, y, level, std::move(best), best_loss), cols);
}

// Single-pass-per-epoch SGD for least squares. Order sensitive by nature;
// only used behind the shuffled wrapper.
std::shared_ptr<const Predictor> fit_sgd(const Rows& rows, const std::vector<std::size_t>& cols,
                                         int epochs, double rate) {
  std::vector<double> w(cols.size() + 1, 0.0);
  for (int e = 0; e < epochs; ++e) {
    for (const auto* r : rows) {
      double pred = w[0];
      for (std::size_t k = 0; k < cols.size(); ++k) pred += w[k + 1] * r->x[cols[k]];
      const double g = pred - r->y;
      w[0] -= rate * g;
      for (std::size_t k = 0; k < cols.size(); ++k) w[k + 1] -= rate * g * r->x[cols[k]];
    }
  }
  const double intercept = w[0];
  w.erase(w.begin());
  return std::make_shared<LinearPredictor>(intercept, std::move(w), cols);
}

std::shared_ptr<const Predictor> fit_spread(const Rows& rows, const std::vector<std::size_t>& cols,
                                            const Predictor& mean, const TrainerSpec& spec) {
  std::vector<LabeledSample> resid;
  resid.reserve(rows.size());
  for (const auto* r : rows) resid.push_back({r->x, std::abs(r->y - mean(r->x)), r->c});
  Rows resid_rows(resid.size());
  for (std::size_t i = 0; i < resid.size(); ++i) resid_rows[i] = &resid[i];
  auto raw = fit_ridge(resid_rows, cols, std::max(spec.ridge_lambda, 1e-6));
  return std::make_shared<FlooredPredictor>(std::move(raw), spec.spread_floor);
}

}  // namespace

FittedModel::FittedModel(std::shared_ptr<const Predictor> mean,
                         std::shared_ptr<const Predictor> quantile,
                         std::optional<double> quantile_level,
                         std::shared_ptr<const Predictor> spread)
    : mean_(std::move(mean)),
      quantile_(std::move(quantile)),
      quantile_level_(quantile_level),
      spread_(std::move(spread)) {
  if (!mean_) throw Error("fitted model requires a mean predictor");
}

double FittedModel::predict_quantile(std::span<const double> x) const {
  if (!quantile_) throw Error("model has no quantile predictor");
  return (*quantile_)(x);
}

double FittedModel::predict_spread(std::span<const double> x) const {
  if (!spread_) throw Error("model has no spread predictor");
  return (*spread_)(x);
}

FittedModel constant_model(double value, std::optional<double> spread) {
  auto mean = std::make_shared<ConstantPredictor>(value);
  std::shared_ptr<const Predictor> sigma;
  if (spread) sigma = std::make_shared<ConstantPredictor>(*spread);
  return FittedModel(mean, nullptr, std::nullopt, sigma);
}

std::string_view to_string(TrainerFamily family) {
  switch (family) {
    case TrainerFamily::constant_mean: return "constant_mean";
    case TrainerFamily::ridge: return "ridge";
    case TrainerFamily::linear_quantile: return "linear_quantile";
    case TrainerFamily::knn: return "knn";
    case TrainerFamily::shuffled_wrapper: return "shuffled_wrapper";
  }
  return "?";
}

TrainerFamily parse_trainer_family(std::string_view name) {
  if (name == "constant_mean") return TrainerFamily::constant_mean;
  if (name == "ridge") return TrainerFamily::ridge;
  if (name == "linear_quantile") return TrainerFamily::linear_quantile;
  if (name == "knn") return TrainerFamily::knn;
  if (name == "shuffled_wrapper") return TrainerFamily::shuffled_wrapper;
  throw Error("unknown trainer family '" + std::string(name) + "'");
}

void TrainerSpec::validate() const {
  if (!(ridge_lambda >= 0.0) || !std::isfinite(ridge_lambda)) {
    throw Error("ridge_lambda must be >= 0");
  }
  if (!(quantile_level > 0.0 && quantile_level < 1.0)) {
    throw Error("quantile_level must lie in (0, 1)");
  }
  if (knn_k < 1) throw Error("knn_k must be >= 1");
  if (gd_steps < 1) throw Error("gd_steps must be >= 1");
  if (!(gd_rate > 0.0)) throw Error("gd_rate must be > 0");
  if (!(spread_floor > 0.0)) throw Error("spread_floor must be > 0");
  if (family == TrainerFamily::shuffled_wrapper && !seed) {
    throw Error("shuffled_wrapper requires a seed");
  }
}

TrainerSpec resolve_features(TrainerSpec spec, std::size_t dim, std::uint64_t seed,
                             std::uint64_t default_key) {
  if (spec.random_features == 0 || !spec.features.empty()) return spec;
  if (spec.random_features > dim) throw Error("random_features exceeds the feature dimension");
  std::vector<std::size_t> all(dim);
  std::iota(all.begin(), all.end(), std::size_t{0});
  Rng rng = substream(seed, "features", spec.feature_key.value_or(default_key));
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(spec.random_features);
  std::sort(all.begin(), all.end());
  spec.features = std::move(all);
  spec.random_features = 0;
  return spec;
}

FittedModel train(const TrainerSpec& spec, std::span<const LabeledSample> data) {
  spec.validate();
  if (data.empty()) throw Error("cannot train on empty data");
  const auto cols = resolve_columns(spec, data.front().x.size());
  Rows rows = canonical_rows(data);

  std::shared_ptr<const Predictor> mean;
  std::shared_ptr<const Predictor> quantile;
  std::optional<double> level;

  switch (spec.family) {
    case TrainerFamily::constant_mean: {
      double s = 0.0;
      for (const auto* r : rows) s += r->y;
      mean = std::make_shared<ConstantPredictor>(s / static_cast<double>(rows.size()));
      break;
    }
    case TrainerFamily::ridge:
      mean = fit_ridge(rows, cols, spec.ridge_lambda);
      break;
    case TrainerFamily::linear_quantile:
      quantile = fit_linear_quantile(rows, cols, spec.quantile_level, spec.gd_steps);
      level = spec.quantile_level;
      mean = quantile;
      break;
    case TrainerFamily::knn:
      mean = std::make_shared<KnnPredictor>(rows, cols, static_cast<std::size_t>(spec.knn_k));
      break;
    case TrainerFamily::shuffled_wrapper: {
      Rng rng(*spec.seed);
      std::shuffle(rows.begin(), rows.end(), rng);
      mean = fit_sgd(rows, cols, spec.gd_steps, spec.gd_rate);
      break;
    }
  }

  std::shared_ptr<const Predictor> spread;
  if (spec.fit_spread) spread = fit_spread(canonical_rows(data), cols, *mean, spec);
  return FittedModel(std::move(mean), std::move(quantile), level, std::move(spread));
}

Trainer make_trainer(TrainerSpec spec) {
  spec.validate();
  return [spec = std::move(spec)](std::span<const LabeledSample> data) { return train(spec, data); };
}

bool canonical_less(const LabeledSample& a, const LabeledSample& b) {
  if (a.x != b.x) return std::lexicographical_compare(a.x.begin(), a.x.end(), b.x.begin(), b.x.end());
  if (a.y != b.y) return a.y < b.y;
  return a.c < b.c;
}

std::vector<LabeledSample> canonical_order(std::span<const LabeledSample> data) {
  std::vector<LabeledSample> out(data.begin(), data.end());
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

std::vector<LabeledSample> oversample_balance(std::span<const LabeledSample> data) {
  std::vector<const LabeledSample*> ones, zeros;
  for (const auto& s : data) {
    if (s.y == 1.0) {
      ones.push_back(&s);
    } else if (s.y == 0.0) {
      zeros.push_back(&s);
    } else {
      throw Error("oversample_balance requires labels in {0, 1}");
    }
  }
  std::vector<LabeledSample> out(data.begin(), data.end());
  if (ones.empty() || zeros.empty()) return out;

  auto& minority = ones.size() < zeros.size() ? ones : zeros;
  const std::size_t majority = std::max(ones.size(), zeros.size());
  const std::size_t count = minority.size();
  std::sort(minority.begin(), minority.end(),
            [](const LabeledSample* a, const LabeledSample* b) { return canonical_less(*a, *b); });

  const std::size_t extra = majority / count - 1;
  const std::size_t remainder = majority % count;
  out.reserve(majority * 2);
  for (const auto* s : minority) {
    for (std::size_t r = 0; r < extra; ++r) out.push_back(*s);
  }
  for (std::size_t i = 0; i < remainder; ++i) out.push_back(*minority[i]);
  return out;
}

double pinball_loss(double residual, double level) {
  return residual >= 0.0 ? level * residual : (level - 1.0) * residual;
}

}  // namespace optcs
