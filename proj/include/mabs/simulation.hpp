#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mabs/alphabet.hpp"
#include "mabs/assignment.hpp"
#include "mabs/instance.hpp"
#include "mabs/rng.hpp"
#include "mabs/types.hpp"

namespace mabs {

// Each column uniform on the probability simplex (exponential spacings), rows
// jointly reordered by increasing norm. Exact norm ties trigger a redraw
// (cap 100). m == 1 returns the all-ones row.
Matrix sample_weights_uniform(int m, Index M, Stream& rng);

// Label sequence meeting the occupancy floor by construction: each unit
// combination planted ceil(M lambda) times, the remaining rows uniform over
// all combinations, then a full shuffle.
Assignment sample_assignment(Index n, int k, int m, Index M, double lambda,
                             Stream& rng);

struct SimPoint {
  Index n = 0;
  Index M = 0;
  double sigma = 0.0;
};

// One synthetic instance: weights redrawn until min(asb, wsb) >= delta
// (cap 1e4 draws, then a validation error reporting the acceptance rate),
// a planted occupancy-feasible selection, additive Gaussian noise.
Instance simulate_instance(const Alphabet& a, int m, const SimPoint& pt,
                           const SeparationParams& params, std::uint64_t seed);

// 10th percentile (nearest rank) of min(asb, wsb) over 200 sampler draws.
// Calibrates a separation level the sampler reaches often enough to be
// useful as a default.
double pilot_delta(const Alphabet& a, int m, Index M, std::uint64_t seed);

struct SweepConfig {
  Alphabet alphabet;
  int m = 0;
  std::vector<Index> n_values;
  std::vector<Index> M_values;
  std::vector<double> sigma_values;
  int replicates = 1;
  // <= 0 means default: delta from the sampler pilot at each M, lambda = 1/M
  double delta = 0.0;
  double lambda = 0.0;
  std::string estimator = "lloyd";  // "lloyd" | "exact-enum" | "exact-grid"
  int restarts = 10;
  std::uint64_t seed = 0;
};

struct SweepCell {
  Index n = 0;
  Index M = 0;
  double sigma = 0.0;
  double delta = 0.0;
  double lambda = 0.0;
  std::string estimator;  // estimator that actually ran for this cell
  int replicate = 0;
  double pred_err = 0.0;
  double class_err = 0.0;  // 1.0 when the selection was missed
  double est_err = 0.0;
  bool feasible = false;
  std::uint64_t seed = 0;
};

struct SweepRecord {
  Index n = 0;
  Index M = 0;
  double sigma = 0.0;
  double delta = 0.0;
  double lambda = 0.0;
  int count = 0;  // replicates with finite errors
  double mean_pred = 0.0, se_pred = 0.0;
  double mean_class = 0.0, se_class = 0.0;
  double mean_est = 0.0, se_est = 0.0;
};

struct SweepResult {
  std::vector<SweepCell> cells;      // flat, point-major then replicate
  std::vector<SweepRecord> records;  // one aggregate per grid point
};

// Monte Carlo sweep over the (n, M, sigma) grid. Replicates run under OpenMP;
// every (point, replicate) owns a seed derived from the master seed, so the
// output is identical at any thread count. Estimators whose preconditions a
// point violates fall back to the alternating estimator, recorded per cell.
SweepResult run_sweep(const SweepConfig& config);

// Header + one line per cell, columns:
// n,M,sigma,delta,lambda,estimator,replicate,pred_err,class_err,est_err,feasible,seed
std::string sweep_csv(const SweepResult& result);
void write_sweep_csv(const std::string& path, const SweepResult& result);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Least-squares decay-rate fit on >= 3 points with positive y:
// "exponential" regresses ln y on x, "power" regresses ln y on ln x.
DecayFit fit_decay(const std::vector<double>& x, const std::vector<double>& y,
                   const std::string& model);

}  // namespace mabs
