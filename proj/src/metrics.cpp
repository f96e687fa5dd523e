#include "mabs/metrics.hpp"

#include <cmath>

#include "mabs/errors.hpp"

namespace mabs {

double estimation_metric(const Assignment& za, const Matrix& wa,
                         const Assignment& zb, const Matrix& wb) {
  if (wa.rows() != wb.rows() || wa.cols() != wb.cols())
    throw validation_error("metric: weight shapes differ");
  if (za.size() != zb.size())
    throw validation_error("metric: selection lengths differ");

  double max_row = 0.0;
  for (Index i = 0; i < wa.rows(); ++i)
    max_row = std::max(max_row, (wa.row(i) - wb.row(i)).norm());

  const double jump = (za == zb) ? 0.0 : std::sqrt(static_cast<double>(wa.cols()));
  return jump + max_row;
}

}  // namespace mabs
