#include <cmath>
#include <random>
#include <string>

#include "optcs/simlab.hpp"

namespace optcs {

namespace {

double jin_piecewise(std::span<const double> x) {
  const double x1 = x[0], x2 = x[1], x3 = x[2];
  return x2 > 0.0 ? 4.0 * x1 * std::max(0.5, x3) : 4.0 * x1 * std::min(x3, -0.5);
}

double jin_smooth(std::span<const double> x) { return 2.0 * (x[0] * x[1] + std::exp(x[3]) - 1.0); }

double jin_cls_step(std::span<const double> x) {
  const double prod = x[0] * x[1];
  return (prod > 0.0 ? 0.5 : 1.0) + x[3];
}

std::size_t min_dim(DgpFamily family) { return family == DgpFamily::liang ? 1 : 4; }

}  // namespace

std::string DgpSpec::name() const {
  const char* base = family == DgpFamily::liang ? "liang" : family == DgpFamily::jin ? "jin" : "jin_cls";
  return std::string(base) + "_" + std::to_string(setting);
}

void DgpSpec::validate() const {
  if (setting < 1 || setting > 4) throw Error("dgp setting must be in 1..4");
  if (d < min_dim(family)) {
    throw Error("dgp " + name() + " needs d >= " + std::to_string(min_dim(family)));
  }
  if (!(sigma > 0.0)) throw Error("dgp sigma must be positive");
  const bool uses_t = family == DgpFamily::liang && (setting == 2 || setting == 4);
  if (uses_t && !(nu > 2.0)) throw Error("dgp nu must exceed 2");
  if (family == DgpFamily::liang && theta_period == 0) throw Error("theta_period must be >= 1");
}

DgpSpec default_dgp(std::string_view name) {
  DgpSpec spec;
  std::string_view rest;
  if (name.starts_with("jin_cls_")) {
    spec.family = DgpFamily::jin_cls;
    spec.d = 10;
    spec.sigma = 0.5;
    rest = name.substr(8);
  } else if (name.starts_with("jin_")) {
    spec.family = DgpFamily::jin;
    spec.d = 20;
    spec.sigma = 1.0;
    rest = name.substr(4);
  } else if (name.starts_with("liang_")) {
    spec.family = DgpFamily::liang;
    rest = name.substr(6);
  } else {
    throw Error("unknown dgp '" + std::string(name) + "'");
  }
  if (rest.size() != 1 || rest[0] < '1' || rest[0] > '4') {
    throw Error("unknown dgp '" + std::string(name) + "'");
  }
  spec.setting = rest[0] - '0';
  return spec;
}

double dgp_mean(const DgpSpec& spec, std::span<const double> x) {
  switch (spec.family) {
    case DgpFamily::liang: {
      if (spec.setting == 3) {
        double sum = 0.0;
        for (double v : x) sum += v;
        return sum / static_cast<double>(spec.d);
      }
      double sum = 0.0;
      for (std::size_t i = spec.theta_period; i <= spec.d; i += spec.theta_period) sum += x[i - 1];
      return sum;
    }
    case DgpFamily::jin:
      return spec.setting % 2 == 1 ? jin_piecewise(x) : jin_smooth(x);
    case DgpFamily::jin_cls:
      return spec.setting % 2 == 1 ? jin_cls_step(x) : jin_smooth(x);
  }
  return 0.0;
}

std::vector<LabeledSample> sample_dgp(const DgpSpec& spec, std::size_t n, Rng& rng) {
  spec.validate();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::student_t_distribution<double> student(spec.nu);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  std::vector<LabeledSample> out(n);
  for (auto& s : out) {
    s.x.resize(spec.d);
    for (auto& v : s.x) {
      if (spec.family != DgpFamily::liang) {
        v = unif(rng);
      } else if (spec.setting == 4) {
        v = student(rng);
      } else {
        v = normal(rng);
      }
    }
    const double mu = dgp_mean(spec, s.x);
    double eps = 0.0;
    switch (spec.family) {
      case DgpFamily::liang:
        if (spec.setting == 2) {
          eps = spec.sigma * student(rng);
        } else if (spec.setting == 3) {
          eps = spec.sigma * normal(rng) / std::sqrt(static_cast<double>(spec.d));
        } else {
          eps = spec.sigma * normal(rng);
        }
        break;
      case DgpFamily::jin:
        if (spec.setting == 1) {
          eps = spec.sigma * normal(rng);
        } else if (spec.setting == 2) {
          eps = 1.5 * spec.sigma * normal(rng);
        } else {
          eps = spec.sigma * (5.5 - std::abs(mu)) / 2.0 * normal(rng);
        }
        break;
      case DgpFamily::jin_cls:
        if (spec.setting == 1) {
          eps = 2.0 * spec.sigma * normal(rng);
        } else if (spec.setting == 2) {
          eps = 1.5 * spec.sigma * normal(rng);
        } else {
          const double div = spec.setting == 3 ? 2.0 : 3.0;
          eps = spec.sigma * (5.5 - std::abs(mu)) / div * normal(rng);
        }
        break;
    }
    s.y = spec.family == DgpFamily::jin_cls ? (mu + eps > 0.0 ? 1.0 : 0.0) : mu + eps;
    s.c = 0.0;
  }
  return out;
}

Problem sample_problem(const DgpSpec& spec, DataSplit split, std::uint64_t master_seed,
                       std::uint64_t rep) {
  Rng rng = substream(master_seed, "data", rep);
  auto labeled = sample_dgp(spec, split.n(), rng);
  auto drawn = sample_dgp(spec, split.m, rng);
  std::vector<TestSample> test;
  test.reserve(drawn.size());
  for (auto& s : drawn) test.push_back({std::move(s.x), s.c, s.y});
  return validate_problem(std::move(labeled), std::move(test), split);
}

}  // namespace optcs
