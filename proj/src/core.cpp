#include "optcs/core.hpp"

#include <algorithm>
#include <cmath>

namespace optcs {

namespace {

bool all_finite(const Vector& x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

Problem validate_problem(std::vector<LabeledSample> labeled, std::vector<TestSample> test,
                         DataSplit split) {
  if (split.n2 == 0) throw Error("empty calibration set");
  if (split.m == 0) throw Error("empty test set");
  if (labeled.size() != split.n()) {
    throw Error("labeled sample count " + std::to_string(labeled.size()) +
                " does not match n1 + n2 = " + std::to_string(split.n()));
  }
  if (test.size() != split.m) {
    throw Error("test sample count " + std::to_string(test.size()) +
                " does not match m = " + std::to_string(split.m));
  }

  const std::size_t d = labeled.front().x.size();
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    const auto& s = labeled[i];
    if (s.x.size() != d) throw Error("dimension mismatch at labeled sample " + std::to_string(i));
    if (!all_finite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.c)) {
      throw Error("non-finite value in labeled sample " + std::to_string(i));
    }
  }
  for (std::size_t j = 0; j < test.size(); ++j) {
    const auto& s = test[j];
    if (s.x.size() != d) throw Error("dimension mismatch at test sample " + std::to_string(j));
    if (!all_finite(s.x) || !std::isfinite(s.c) ||
        (s.y_hidden && !std::isfinite(*s.y_hidden))) {
      throw Error("non-finite value in test sample " + std::to_string(j));
    }
  }

  Problem p;
  p.labeled_ = std::move(labeled);
  p.test_ = std::move(test);
  p.split_ = split;
  p.dim_ = d;
  return p;
}

Problem Problem::with_n1(std::size_t n1) const {
  const std::size_t n = split_.n();
  if (n1 >= n) throw Error("empty calibration set");
  Problem p = *this;
  p.split_.n1 = n1;
  p.split_.n2 = n - n1;
  return p;
}

Problem Problem::without_ground_truth() const {
  Problem p = *this;
  for (auto& t : p.test_) t.y_hidden.reset();
  return p;
}

bool Problem::has_ground_truth() const {
  return std::all_of(test_.begin(), test_.end(), [](const TestSample& t) { return t.y_hidden.has_value(); });
}

ScoreMatrix::ScoreMatrix(std::size_t m, std::size_t n2) : m_(m), n2_(n2), data_(m * (n2 + m)) {}

ScoreMatrix ScoreMatrix::broadcast(std::span<const double> shared, std::size_t m, std::size_t n2) {
  if (shared.size() != n2 + m) throw Error("score vector length must be n2 + m");
  ScoreMatrix out(m, n2);
  for (std::size_t j = 0; j < m; ++j) std::copy(shared.begin(), shared.end(), out.row(j).begin());
  return out;
}

void ScoreConfig::validate() const {
  if (!(big_m > 0.0) || !std::isfinite(big_m)) throw Error("score constant M must be positive");
  const bool is_quantile = kind == ScoreKind::clipped_quantile;
  if (is_quantile != quantile_level.has_value()) {
    throw Error("quantile_level must be given exactly for clipped_quantile scores");
  }
  if (quantile_level && !(*quantile_level > 0.0 && *quantile_level < 1.0)) {
    throw Error("quantile_level must lie in (0, 1)");
  }
}

std::string_view to_string(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::clipped_mean: return "clipped_mean";
    case ScoreKind::clipped_studentized: return "clipped_studentized";
    case ScoreKind::clipped_quantile: return "clipped_quantile";
  }
  return "?";
}

std::string_view to_string(PruneMode mode) {
  switch (mode) {
    case PruneMode::hete: return "hete";
    case PruneMode::homo: return "homo";
    case PruneMode::dtm: return "dtm";
  }
  return "?";
}

ScoreKind parse_score_kind(std::string_view name) {
  if (name == "clipped_mean") return ScoreKind::clipped_mean;
  if (name == "clipped_studentized") return ScoreKind::clipped_studentized;
  if (name == "clipped_quantile") return ScoreKind::clipped_quantile;
  throw Error("unknown score kind '" + std::string(name) + "'");
}

PruneMode parse_prune_mode(std::string_view name) {
  if (name == "hete") return PruneMode::hete;
  if (name == "homo") return PruneMode::homo;
  if (name == "dtm") return PruneMode::dtm;
  throw Error("unknown prune mode '" + std::string(name) + "'");
}

void check_level(double q) {
  if (!(q > 0.0 && q < 1.0)) throw Error("FDR level q must lie in (0, 1)");
}

}  // namespace optcs
