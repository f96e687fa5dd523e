#include "mabs/constructions.hpp"

#include <cmath>
#include <string>

#include "mabs/errors.hpp"
#include "mabs/separation.hpp"
#include "mabs/weights.hpp"

namespace mabs {

double asb_upper_bound(const Alphabet& a, int m) {
  if (m < 1) throw validation_error("bound: m must be >= 1");
  const double md = static_cast<double>(m);
  return (1.0 + md * a.a_max()) / std::sqrt(2.0 * md * (md + 1.0));
}

AsbLimits asb_limit_constants(const Alphabet& a, int m) {
  if (m < 2) throw validation_error("limits: m must be >= 2");
  const double md = static_cast<double>(m);
  const AlphabetGaps gaps = alphabet_gaps(a);
  const double k_pow = std::pow(static_cast<double>(a.k()), 2.0 * md);

  AsbLimits lim;
  lim.c_lower = std::sqrt(2.0) * gaps.second_min_gap /
                (std::sqrt(3.0) * k_pow * md * md * (md - 1.0));
  lim.C_upper = std::sqrt(2.0) * (1.0 + md * a.a_max()) / std::sqrt(md * (md - 1.0));
  return lim;
}

Matrix omega_star_quadratic(const Alphabet& a, int m, double delta) {
  if (m < 1) throw validation_error("quadratic witness: m must be >= 1");
  if (m == 1) return Matrix::Ones(1, 1);

  const double md = static_cast<double>(m);
  const double limit = (1.0 + md * a.a_max()) / (2.0 * std::sqrt(md) * (md - 1.0));
  if (!(delta > 0.0) || delta >= limit)
    throw validation_error("quadratic witness: delta must lie in (0, " +
                           std::to_string(limit) + ")");

  const double factor = 2.0 * delta * std::sqrt(md) / (1.0 + md * a.a_max());
  Matrix omega = Matrix::Identity(m, m);
  for (int i = 0; i < m - 1; ++i) {
    omega(i, i) -= factor * static_cast<double>(m - 1 - i);
    omega(m - 1, i) += factor * static_cast<double>(m - 1 - i);
  }
  require_valid_weights(omega);
  return omega;
}

Matrix omega_extend(const Matrix& omega_quad, Index M) {
  const Index m = omega_quad.rows();
  if (omega_quad.cols() != m)
    throw validation_error("extend: input must be square");
  require_valid_weights(omega_quad);
  if (M < m) throw validation_error("extend: M must be >= m");

  const Index copies = M / m;
  Matrix omega = Matrix::Zero(m, M);
  for (Index c = 0; c < copies; ++c)
    omega.block(0, c * m, m, m) = omega_quad;
  for (Index j = copies * m; j < M; ++j) omega(m - 1, j) = 1.0;

  require_valid_weights(omega);
  return omega;
}

namespace {

Matrix calibration_path(const Matrix& omega, double epsilon) {
  Matrix w = omega;
  const Index m = omega.rows();
  w.row(0) = epsilon * omega.row(0);
  w.row(m - 1) = omega.row(m - 1) + (1.0 - epsilon) * omega.row(0);
  return w;
}

}  // namespace

Calibration calibrate_asb(const Matrix& omega, const Alphabet& a, double target) {
  if (omega.rows() < 2)
    throw validation_error("calibrate: need m >= 2, the path is degenerate otherwise");
  require_valid_weights(omega);
  const double start = asb(omega, a);
  if (!(target > 0.0) || target > start)
    throw validation_error("calibrate: target must lie in (0, asb(omega)]");

  Calibration cal;
  if (start - target <= 1e-9) {
    cal.omega = omega;
    cal.epsilon = 1.0;
    cal.achieved = start;
    return cal;
  }

  // Rightmost bracket: walk down from 1 until the boundary dips below target.
  const int kScanSteps = 1024;
  double lo = 0.0, hi = 1.0;
  for (int s = 1; s <= kScanSteps; ++s) {
    const double e = 1.0 - static_cast<double>(s) / kScanSteps;
    const double value = asb(calibration_path(omega, e), a);
    if (value < target) {
      lo = e;
      hi = e + 1.0 / kScanSteps;
      break;
    }
    if (s == kScanSteps) {
      lo = 0.0;
      hi = 1.0 / kScanSteps;
    }
  }

  int iters = 0;
  while (hi - lo > 1e-12 && iters < 200) {
    const double mid = 0.5 * (lo + hi);
    if (asb(calibration_path(omega, mid), a) >= target)
      hi = mid;
    else
      lo = mid;
    ++iters;
  }

  cal.omega = calibration_path(omega, hi);
  cal.epsilon = hi;
  cal.achieved = asb(cal.omega, a);
  cal.iterations = iters;
  if (std::abs(cal.achieved - target) > 1e-9)
    throw estimation_failure("calibrate: bisection did not reach the target level");
  return cal;
}

Matrix hyperrectangle_perturbation(const Matrix& center, const Matrix& eps) {
  const Index m = center.rows();
  if (m < 2) throw validation_error("hyperrectangle: need m >= 2");
  if (eps.rows() != m - 1 || eps.cols() != center.cols())
    throw validation_error("hyperrectangle: eps must be (m-1) x M");

  Matrix out = center;
  out.topRows(m - 1) += eps;
  out.row(m - 1) -= eps.colwise().sum();

  try {
    require_valid_weights(out);
  } catch (const validation_error& e) {
    throw validation_error(std::string("hyperrectangle: infeasible perturbation: ") +
                           e.what());
  }
  return out;
}

double hyperrectangle_limit(const Alphabet& a, int m) {
  if (m < 1) throw validation_error("hyperrectangle: m must be >= 1");
  const double md = static_cast<double>(m);
  const AlphabetGaps gaps = alphabet_gaps(a);
  return gaps.min_gap / (6.0 * std::sqrt(2.0) * std::pow(md, 2.5) * a.a_max());
}

}  // namespace mabs
