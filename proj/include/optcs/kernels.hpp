#pragma once

// Leave-one-out refit kernel shared by every full-data procedure.
//
// For each position l in [first, pool.size()) the trainer is fitted on
// pool \ {pool[l]} (class-balanced first when `oversample` is set) and the
// resulting model is handed to visit(l - first, model). Refits are
// independent; `serial` is the reference loop and `omp` the OpenMP one.
// Both produce identical models because trainers are order invariant.

#include <cstddef>
#include <functional>
#include <span>

#include "optcs/core.hpp"
#include "optcs/models.hpp"
#include "optcs/parallel.hpp"

namespace optcs::kernels {

using LooVisitor = std::function<void(std::size_t slot, const FittedModel& model)>;

namespace serial {
void leave_one_out(const Trainer& trainer, std::span<const LabeledSample> pool, std::size_t first,
                   bool oversample, const LooVisitor& visit);
}  // namespace serial

namespace omp {
void leave_one_out(const Trainer& trainer, std::span<const LabeledSample> pool, std::size_t first,
                   bool oversample, const LooVisitor& visit, int threads);
}  // namespace omp

inline void leave_one_out(const Trainer& trainer, std::span<const LabeledSample> pool,
                          std::size_t first, bool oversample, const LooVisitor& visit, Exec exec) {
  if (exec.threads <= 1) {
    serial::leave_one_out(trainer, pool, first, oversample, visit);
  } else {
    omp::leave_one_out(trainer, pool, first, oversample, visit, exec.threads);
  }
}

}  // namespace optcs::kernels
