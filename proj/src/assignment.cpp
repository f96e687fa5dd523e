#include "mabs/assignment.hpp"

#include <cmath>

#include "mabs/design.hpp"
#include "mabs/errors.hpp"

namespace mabs {

std::vector<std::int64_t> unit_counts(const Assignment& z, int k, int m) {
  const std::int64_t n_rows = design_row_count(k, m);
  // unit combination i sits at row k^(m-i)
  std::vector<std::int64_t> unit_index(m);
  std::int64_t p = 1;
  for (int i = m; i >= 1; --i) {
    unit_index[i - 1] = p;
    p *= k;
  }

  std::vector<std::int64_t> counts(m, 0);
  for (std::int64_t label : z.labels) {
    if (label < 0 || label >= n_rows)
      throw validation_error("assignment: label out of design range");
    for (int i = 0; i < m; ++i)
      if (label == unit_index[i]) ++counts[i];
  }
  return counts;
}

bool is_separable(const Assignment& z, int k, int m) {
  for (std::int64_t c : unit_counts(z, k, m))
    if (c < 1) return false;
  return true;
}

LambdaSeparation lambda_separation(const Assignment& z, int k, int m, Index M,
                                   double lambda) {
  if (M < 1) throw validation_error("assignment: M must be >= 1");
  if (!(lambda > 0.0)) throw validation_error("assignment: lambda must be > 0");

  LambdaSeparation r;
  r.counts = unit_counts(z, k, m);
  r.required = static_cast<std::int64_t>(
      std::ceil(static_cast<double>(M) * lambda - 1e-12));
  r.pass = true;
  for (std::int64_t c : r.counts)
    if (c < r.required) r.pass = false;
  return r;
}

}  // namespace mabs
