#pragma once

#include "mabs/alphabet.hpp"
#include "mabs/types.hpp"

namespace mabs {

// Universal cap: no valid m x M weight matrix has min(asb, wsb) above
// (1 + m a_k) / sqrt(2 m (m + 1)).
double asb_upper_bound(const Alphabet& a, int m);

// Almost-sure band for the separation boundary of uniformly drawn weights as
// the number of columns grows:
//   c = sqrt(2) gap2 / (sqrt(3) k^(2m) m^2 (m - 1)),
//   C = sqrt(2) (1 + m a_k) / sqrt(m (m - 1)),
// with gap2 the second-order alphabet gap. Requires m >= 2.
struct AsbLimits {
  double c_lower = 0.0;
  double C_upper = 0.0;
};
AsbLimits asb_limit_constants(const Alphabet& a, int m);

// Square witness with weak separation at level delta: identity minus a scaled
// band matrix (diagonal m-1, ..., 1, 0; last row the negated diagonal), scale
// 2 delta sqrt(m) / (1 + m a_k). Valid for
//   0 < delta < (1 + m a_k) / (2 sqrt(m) (m - 1)),
// and for delta <= 0.2 gap1 / sqrt(m) the alphabet boundary reaches delta too.
Matrix omega_star_quadratic(const Alphabet& a, int m, double delta);

// Widens an m x m witness to m x M: floor(M/m) copies of its columns plus
// last-unit-row padding columns. Both boundaries scale by
// sqrt(floor(M/m) * m / M).
Matrix omega_extend(const Matrix& omega_quad, Index M);

// Path that shrinks row 1 by epsilon and hands the removed mass to row m;
// the weak boundary never decreases along it while the alphabet boundary
// sweeps from 0 up to its input value. Finds the rightmost epsilon in [0, 1]
// whose alphabet boundary hits target (descending-scan bracket + bisection,
// 200 iterations, 1e-12 bracket width; |achieved - target| <= 1e-9).
struct Calibration {
  Matrix omega;
  double epsilon = 1.0;
  double achieved = 0.0;
  int iterations = 0;
};
Calibration calibrate_asb(const Matrix& omega, const Alphabet& a, double target);

// Adds eps ((m-1) x M) to rows 1..m-1 and subtracts its column sums from row
// m, preserving column sums exactly. Throws if the result leaves the valid
// weight set.
Matrix hyperrectangle_perturbation(const Matrix& center, const Matrix& eps);

// Largest entry size under which the perturbation provably stays valid around
// interior centers: gap1 / (6 sqrt(2) m^(5/2) a_k). Reported, not enforced.
double hyperrectangle_limit(const Alphabet& a, int m);

}  // namespace mabs
