#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "mabs/alphabet.hpp"
#include "mabs/assignment.hpp"
#include "mabs/design.hpp"
#include "mabs/separation.hpp"
#include "mabs/types.hpp"

namespace mabs {

// Exhaustive labeling search is capped at (k^m)^n <= this.
inline constexpr std::int64_t kEnumerationBudget = 200'000;
// Global minimizers within this objective gap are reported together.
inline constexpr double kTieTolerance = 1e-10;

struct Minimizer {
  Assignment labels;
  Matrix omega;
  double objective = 0.0;
};

struct EstimationResult {
  Assignment labels;
  Matrix omega;
  double objective = std::numeric_limits<double>::infinity();
  bool feasible = false;
  long iterations = 0;
  int restarts_used = 0;
  // all global minimizers within kTieTolerance of the best objective,
  // in search order; filled by the exhaustive oracle only
  std::vector<Minimizer> ties;
};

// Residual of a (labeling, weights) pair: squared Frobenius distance between
// the observations and the implied mixture.
double lse_objective(const Matrix& Y, const Assignment& z, const Matrix& omega,
                     const DesignMatrix& design);

// Euclidean projection onto the probability simplex.
Vector project_to_simplex(const Vector& v);

struct SimplexFit {
  Matrix raw;     // per-column simplex optimum, rows in design order
  Matrix sorted;  // rows reordered by increasing norm
  std::vector<int> permutation;  // sorted row i came from raw row permutation[i]
  long iterations = 0;
};

// Column-separable constrained least squares for a fixed labeling: each weight
// column solves min |Y_col - A_z v|^2 over the simplex by projected gradient
// with step 1/lambda_max(A_z^T A_z), stopping when the objective moves by less
// than 1e-12 (cap 1e4 iterations per column). The labeling must be separable,
// otherwise the quadratic can be degenerate.
SimplexFit fit_weights_simplex(const Matrix& Y, const Assignment& z,
                               const DesignMatrix& design,
                               const Matrix* warm = nullptr);

// Exact constrained least squares by exhausting all occupancy-feasible
// labelings. Per labeling the weight optimum comes from the simplex fit when
// that already satisfies ordering and both separation boundaries; otherwise
// from an exact interval solve (M == 1, m == 2) or a restricted grid
// (M == 2, m == 2). Ties within kTieTolerance are all reported.
EstimationResult exact_lse_enumerate(const Matrix& Y, const Alphabet& a, int m,
                                     const SeparationParams& p);

// Grid oracle for m == 2, M <= 2: row-1 coordinates gridded over [0, 1] at
// step h, feasibility decided by the core predicates, objective = nearest
// combination per row plus the exact minimum-cost relabeling that meets the
// occupancy floor; one refinement pass at h/100 around the best point.
EstimationResult exact_lse_grid(const Matrix& Y, const Alphabet& a, int m,
                                const SeparationParams& p, double h = 1e-3);

// Alternating estimator: decode rows, repair occupancy, refit weights on the
// simplex, reorder rows; stops when the objective improves by less than 1e-10
// (cap 500 rounds). Restart 0 seeds from exact recovery when that certifies
// (or from *init when given); later restarts draw random weights from
// (seed, restart). Best restart wins, feasible results preferred. A best
// result that misses the separation level is returned with feasible = false.
EstimationResult lloyd_lse(const Matrix& Y, const Alphabet& a, int m,
                           const SeparationParams& p, int restarts = 10,
                           std::uint64_t seed = 0, const Matrix* init = nullptr);

// Feasible row-1 weight values for two sources and one column: every pairwise
// combination-value difference is affine in t, so the set
// {t : min(asb, wsb) >= delta} is an exact union of closed intervals.
std::vector<std::pair<double, double>> feasible_omega1_intervals(const Alphabet& a,
                                                                 double delta);

// Normalized squared mixture distance |mixture(zhat, what) - truth|_F^2 / (n M).
double prediction_error(const Assignment& zhat, const Matrix& what,
                        const Matrix& truth, const DesignMatrix& design);

// True iff the labelings differ anywhere.
bool classification_flag(const Assignment& zhat, const Assignment& z);

// Squared pair distance scaled by 1/M.
double estimation_error(const Assignment& zhat, const Matrix& what,
                        const Assignment& z, const Matrix& omega);

}  // namespace mabs
