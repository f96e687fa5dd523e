#include "mabs/weights.hpp"

#include <cmath>
#include <limits>

#include "mabs/errors.hpp"

namespace mabs {

Vector row_norms(const Matrix& omega) {
  return omega.rowwise().norm();
}

WeightsDiagnostics validate_weights(const Matrix& omega) {
  WeightsDiagnostics d;
  if (omega.rows() < 1 || omega.cols() < 1)
    throw validation_error("weights: empty matrix");

  d.min_entry = omega.minCoeff();
  d.nonnegative = d.min_entry >= 0.0;

  d.max_column_sum_dev = (omega.colwise().sum().array() - 1.0).abs().maxCoeff();
  d.columns_normalized = d.max_column_sum_dev <= kColumnSumTol;

  const Vector norms = row_norms(omega);
  double min_gap = std::numeric_limits<double>::infinity();
  for (Index i = 1; i < norms.size(); ++i)
    min_gap = std::min(min_gap, norms[i] - norms[i - 1]);
  if (norms.size() == 1) min_gap = std::numeric_limits<double>::infinity();
  d.min_row_norm_gap = min_gap;
  // strict ordering, and the first row must carry mass
  d.rows_ordered = min_gap > 0.0 && norms[0] > 0.0;

  return d;
}

void require_valid_weights(const Matrix& omega) {
  const WeightsDiagnostics d = validate_weights(omega);
  if (!d.nonnegative) throw validation_error("weights: negative entry");
  if (!d.columns_normalized)
    throw validation_error("weights: column sums deviate from one beyond 1e-12");
  if (!d.rows_ordered)
    throw validation_error("weights: row norms not strictly increasing");
}

}  // namespace mabs
