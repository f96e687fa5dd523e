#pragma once

#include "mabs/types.hpp"

namespace mabs {

inline constexpr double kColumnSumTol = 1e-12;

// Valid weight matrices are m x M with nonnegative entries, columns summing
// to one within kColumnSumTol, and strictly increasing Euclidean row norms.
struct WeightsDiagnostics {
  double max_column_sum_dev = 0.0;
  double min_entry = 0.0;
  double min_row_norm_gap = 0.0;  // ordering margin; rows_ordered iff > 0
  bool nonnegative = false;
  bool columns_normalized = false;
  bool rows_ordered = false;

  bool valid() const { return nonnegative && columns_normalized && rows_ordered; }
};

WeightsDiagnostics validate_weights(const Matrix& omega);

// Throws validation_error with the failing property named.
void require_valid_weights(const Matrix& omega);

Vector row_norms(const Matrix& omega);

}  // namespace mabs
