#include "optcs/kernels.hpp"

#include <string>
#include <vector>

namespace optcs::kernels {

namespace {

FittedModel fit_without(const Trainer& trainer, std::span<const LabeledSample> train_set,
                        bool oversample, std::size_t leave_out) {
  try {
    if (oversample) {
      const auto balanced = oversample_balance(train_set);
      return trainer(balanced);
    }
    return trainer(train_set);
  } catch (const std::exception& e) {
    throw Error("training failed with leave-out index " + std::to_string(leave_out) + ": " +
                e.what());
  }
}

}  // namespace

namespace serial {

void leave_one_out(const Trainer& trainer, std::span<const LabeledSample> pool, std::size_t first,
                   bool oversample, const LooVisitor& visit) {
  for (std::size_t l = first; l < pool.size(); ++l) {
    std::vector<LabeledSample> train_set;
    train_set.reserve(pool.size() - 1);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (i != l) train_set.push_back(pool[i]);
    }
    visit(l - first, fit_without(trainer, train_set, oversample, l));
  }
}

}  // namespace serial

namespace omp {

void leave_one_out(const Trainer& trainer, std::span<const LabeledSample> pool, std::size_t first,
                   bool oversample, const LooVisitor& visit, int threads) {
  if (pool.size() <= first) return;
  const auto count = static_cast<long long>(pool.size() - first);
  std::exception_ptr error;
  long long error_slot = count;

#pragma omp parallel num_threads(threads)
  {
    // Per-thread buffer; copy-assignment reuses each sample's storage.
    std::vector<LabeledSample> train_set(pool.begin() + 1, pool.end());
#pragma omp for schedule(dynamic)
    for (long long slot = 0; slot < count; ++slot) {
      const std::size_t l = first + static_cast<std::size_t>(slot);
      std::size_t k = 0;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        if (i != l) train_set[k++] = pool[i];
      }
      try {
        visit(static_cast<std::size_t>(slot), fit_without(trainer, train_set, oversample, l));
      } catch (...) {
#pragma omp critical(optcs_loo_error)
        {
          if (slot < error_slot) {
            error_slot = slot;
            error = std::current_exception();
          }
        }
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace omp

}  // namespace optcs::kernels
