#pragma once

#include <cstdint>
#include <vector>

#include "mabs/alphabet.hpp"
#include "mabs/assignment.hpp"
#include "mabs/types.hpp"

namespace mabs {

struct SeparationParams {
  double delta = 0.0;
  double lambda = 0.0;
  double epsilon = 0.0;
};

// delta > 0, lambda in (0, 1], epsilon >= 0.
void validate_params(const SeparationParams& p);

// Alphabet separation boundary:
//   min over distinct combinations e, e' of |e omega - e' omega| / sqrt(M).
// Exhaustive scan over all design-row pairs. The OpenMP kernel partitions the
// pair range; a min-reduction over identical per-pair values is order
// independent, so the parallel result is bitwise equal to the serial one.
double asb(const Matrix& omega, const Alphabet& a);

// Weak separation boundary:
//   (1 + m a_k) / (2 sqrt(M)) * min_i (|row_i| - |row_{i-1}|).
// +infinity when m == 1: a single row has no gap to bound, and every
// consumer treats the boundary as the binding minimum with the alphabet one.
double wsb(const Matrix& omega, const Alphabet& a);

namespace serial {
// Reference implementation kept for testing the OpenMP kernel.
double asb(const Matrix& omega, const Alphabet& a);
}  // namespace serial

struct SeparationDiagnostics {
  double asb = 0.0;
  double wsb = 0.0;
  std::vector<std::int64_t> unit_counts;
  std::int64_t required = 0;
  bool pass_ic1 = false;  // min(asb, wsb) >= delta
  bool pass_ic2 = false;  // every unit combination appears >= ceil(M lambda)
  bool pass = false;
};

// Full separation check of a (weights, selection) pair; pass is exactly
// membership in the delta/lambda identified class.
SeparationDiagnostics is_delta_separable(const Matrix& omega, const Assignment& z,
                                         const Alphabet& a,
                                         const SeparationParams& p);

}  // namespace mabs
