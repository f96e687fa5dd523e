#pragma once

#include <stdexcept>
#include <string>

namespace mabs {

// Error taxonomy, mirrored by the CLI exit codes:
//   validation_error    -> 2  (bad input or parameter domain)
//   capacity_error      -> 3  (combinatorial budget exceeded)
//   recovery_failure,
//   estimation_failure  -> 4  (no certified / feasible result)
struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct capacity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct recovery_failure : std::runtime_error {
  double best_residual;
  recovery_failure(const std::string& msg, double residual)
      : std::runtime_error(msg), best_residual(residual) {}
};

struct estimation_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mabs
