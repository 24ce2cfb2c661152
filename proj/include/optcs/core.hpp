#pragma once

// Domain types shared by every module: samples, the validated problem
// instance, score matrices, score configuration and selection outcomes.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace optcs {

inline constexpr std::string_view kVersion = "0.1.0";

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Vector = std::vector<double>;

struct LabeledSample {
  Vector x;
  double y = 0.0;
  double c = 0.0;  // selection threshold: the sample is "of interest" iff y > c
  bool operator==(const LabeledSample&) const = default;
};

// A test point. `y_hidden` carries ground truth for simulations and metric
// computation only; no score, p-value or selection routine reads it.
struct TestSample {
  Vector x;
  double c = 0.0;
  std::optional<double> y_hidden;
  bool operator==(const TestSample&) const = default;
};

struct DataSplit {
  std::size_t n1 = 0;  // preparatory
  std::size_t n2 = 0;  // calibration
  std::size_t m = 0;   // test

  std::size_t n() const { return n1 + n2; }
};

// Immutable, validated problem: labeled samples partitioned into a
// preparatory block [0, n1) and a calibration block [n1, n1 + n2), plus m
// test samples. Obtain one through validate_problem().
class Problem {
 public:
  std::span<const LabeledSample> labeled() const { return labeled_; }
  std::span<const LabeledSample> preparatory() const {
    return std::span<const LabeledSample>(labeled_).first(split_.n1);
  }
  std::span<const LabeledSample> calibration() const {
    return std::span<const LabeledSample>(labeled_).subspan(split_.n1, split_.n2);
  }
  std::span<const TestSample> test() const { return test_; }
  const DataSplit& split() const { return split_; }
  std::size_t dim() const { return dim_; }

  // Same samples, new partition point between preparatory and calibration.
  Problem with_n1(std::size_t n1) const;
  // Same samples with every y_hidden erased.
  Problem without_ground_truth() const;
  bool has_ground_truth() const;

 private:
  friend Problem validate_problem(std::vector<LabeledSample>, std::vector<TestSample>,
                                  DataSplit);
  Problem() = default;

  std::vector<LabeledSample> labeled_;
  std::vector<TestSample> test_;
  DataSplit split_;
  std::size_t dim_ = 0;
};

// Checks sizes against the split, a single feature dimension, finiteness
// of every value, n2 >= 1 and m >= 1. Throws Error on violation.
Problem validate_problem(std::vector<LabeledSample> labeled, std::vector<TestSample> test,
                         DataSplit split);

// Dense m x (n2 + m) matrix. Row j holds the n2 calibration scores followed
// by the m test scores produced for the j-th p-value.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  ScoreMatrix(std::size_t m, std::size_t n2);

  std::size_t rows() const { return m_; }
  std::size_t n2() const { return n2_; }
  std::size_t cols() const { return n2_ + m_; }

  std::span<double> row(std::size_t j) { return {data_.data() + j * cols(), cols()}; }
  std::span<const double> row(std::size_t j) const {
    return {data_.data() + j * cols(), cols()};
  }
  std::span<const double> calibration(std::size_t j) const { return row(j).first(n2_); }
  std::span<const double> tests(std::size_t j) const { return row(j).subspan(n2_); }

  // Every row set to `shared` (length n2 + m).
  static ScoreMatrix broadcast(std::span<const double> shared, std::size_t m, std::size_t n2);

  bool operator==(const ScoreMatrix&) const = default;

 private:
  std::size_t m_ = 0;
  std::size_t n2_ = 0;
  std::vector<double> data_;
};

enum class ScoreKind { clipped_mean, clipped_studentized, clipped_quantile };

struct ScoreConfig {
  ScoreKind kind = ScoreKind::clipped_mean;
  double big_m = 100.0;
  std::optional<double> quantile_level;  // present iff kind == clipped_quantile

  void validate() const;
};

enum class PruneMode { hete, homo, dtm };

// Result of any selection procedure. Indices are 0-based internally.
struct SelectionOutcome {
  std::vector<double> pvalues;
  std::vector<double> aux_sizes;  // R_j
  std::vector<double> xi;         // pruning variables
  std::size_t r_star = 0;
  std::vector<std::size_t> selected;  // sorted ascending
  std::optional<std::vector<std::size_t>> selected_models;

  bool operator==(const SelectionOutcome&) const = default;
};

std::string_view to_string(ScoreKind kind);
std::string_view to_string(PruneMode mode);
ScoreKind parse_score_kind(std::string_view name);
PruneMode parse_prune_mode(std::string_view name);

void check_level(double q);  // q in (0, 1)

}  // namespace optcs
