#pragma once

#include "mabs/assignment.hpp"
#include "mabs/types.hpp"

namespace mabs {

// Distance between two (selection, weights) pairs:
//   sqrt(M) * [selections differ] + max_i |row_i(wa) - row_i(wb)|.
double estimation_metric(const Assignment& za, const Matrix& wa,
                         const Assignment& zb, const Matrix& wb);

}  // namespace mabs
