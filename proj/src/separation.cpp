#include "mabs/separation.hpp"

#include <cmath>
#include <limits>

#include "mabs/design.hpp"
#include "mabs/errors.hpp"
#include "mabs/weights.hpp"

namespace mabs {

void validate_params(const SeparationParams& p) {
  if (!(p.delta > 0.0)) throw validation_error("params: delta must be > 0");
  if (!(p.lambda > 0.0) || p.lambda > 1.0)
    throw validation_error("params: lambda must lie in (0, 1]");
  if (p.epsilon < 0.0) throw validation_error("params: epsilon must be >= 0");
}

namespace {

// Mixture values of all combinations: design * omega, k^m x M.
Matrix combination_values(const Matrix& omega, const Alphabet& a) {
  const int m = static_cast<int>(omega.rows());
  const DesignMatrix d = DesignMatrix::build(a, m);
  return d.rows * omega;
}

double min_pair_distance_serial(const Matrix& values) {
  const Index n = values.rows();
  double best = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      best = std::min(best, (values.row(i) - values.row(j)).norm());
  return best;
}

double min_pair_distance_parallel(const Matrix& values) {
  const Index n = values.rows();
  double best = std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(min : best)
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      best = std::min(best, (values.row(i) - values.row(j)).norm());
  return best;
}

}  // namespace

double asb(const Matrix& omega, const Alphabet& a) {
  const Matrix values = combination_values(omega, a);
  return min_pair_distance_parallel(values) / std::sqrt(static_cast<double>(omega.cols()));
}

namespace serial {
double asb(const Matrix& omega, const Alphabet& a) {
  const Matrix values = combination_values(omega, a);
  return min_pair_distance_serial(values) / std::sqrt(static_cast<double>(omega.cols()));
}
}  // namespace serial

double wsb(const Matrix& omega, const Alphabet& a) {
  const int m = static_cast<int>(omega.rows());
  if (m == 1) return std::numeric_limits<double>::infinity();

  const Vector norms = row_norms(omega);
  double min_gap = std::numeric_limits<double>::infinity();
  for (Index i = 1; i < norms.size(); ++i)
    min_gap = std::min(min_gap, norms[i] - norms[i - 1]);

  const double prefactor =
      (1.0 + m * a.a_max()) / (2.0 * std::sqrt(static_cast<double>(omega.cols())));
  return prefactor * min_gap;
}

SeparationDiagnostics is_delta_separable(const Matrix& omega, const Assignment& z,
                                         const Alphabet& a,
                                         const SeparationParams& p) {
  validate_params(p);
  require_valid_weights(omega);
  const int m = static_cast<int>(omega.rows());
  const Index M = omega.cols();

  SeparationDiagnostics d;
  d.asb = asb(omega, a);
  d.wsb = wsb(omega, a);
  d.pass_ic1 = std::min(d.asb, d.wsb) >= p.delta;

  const LambdaSeparation ls = lambda_separation(z, a.k(), m, M, p.lambda);
  d.unit_counts = ls.counts;
  d.required = ls.required;
  d.pass_ic2 = ls.pass;

  d.pass = d.pass_ic1 && d.pass_ic2;
  return d;
}

}  // namespace mabs
