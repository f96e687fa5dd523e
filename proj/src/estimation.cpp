#include "mabs/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "mabs/errors.hpp"
#include "mabs/metrics.hpp"
#include "mabs/mixture.hpp"
#include "mabs/recovery.hpp"
#include "mabs/rng.hpp"
#include "mabs/simulation.hpp"
#include "mabs/weights.hpp"

namespace mabs {

double lse_objective(const Matrix& Y, const Assignment& z, const Matrix& omega,
                     const DesignMatrix& design) {
  return (Y - mixture(z, omega, design)).squaredNorm();
}

Vector project_to_simplex(const Vector& v) {
  const Index m = v.size();
  std::vector<double> u(v.data(), v.data() + m);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumulative = 0.0;
  double tau = u[0] - 1.0;
  for (Index i = 0; i < m; ++i) {
    cumulative += u[static_cast<std::size_t>(i)];
    const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (u[static_cast<std::size_t>(i)] - t > 0.0) tau = t;
  }
  Vector out(m);
  for (Index i = 0; i < m; ++i) out[i] = std::max(v[i] - tau, 0.0);
  return out;
}

namespace {

constexpr double kFitTol = 1e-12;
constexpr long kFitCap = 10'000;
constexpr double kLloydTol = 1e-10;
constexpr int kLloydCap = 500;

void check_labels(const Matrix& Y, const Assignment& z, const DesignMatrix& design) {
  if (z.size() != Y.rows())
    throw validation_error("fit: labeling length does not match the row count");
  for (const auto label : z.labels)
    if (label < 0 || label >= design.n_rows())
      throw validation_error("fit: label outside the combination range");
}

std::vector<Index> unit_indices(const DesignMatrix& design) {
  std::vector<Index> units(static_cast<std::size_t>(design.m));
  for (int i = 1; i <= design.m; ++i)
    units[static_cast<std::size_t>(i - 1)] = design.unit_row_index(i);
  return units;
}

// Sorted-row view of a raw fit plus the digit permutation that keeps the
// mixture unchanged: sorted.row(i) = raw.row(perm[i]), so a combination's
// digit i must come from digit perm[i].
Assignment permute_labels(const Assignment& z, const std::vector<int>& perm,
                          const DesignMatrix& design) {
  bool identity = true;
  for (std::size_t i = 0; i < perm.size(); ++i)
    if (perm[i] != static_cast<int>(i)) identity = false;
  if (identity) return z;

  Assignment out;
  out.labels.resize(z.labels.size());
  std::vector<int> digits, permuted(perm.size());
  for (std::size_t j = 0; j < z.labels.size(); ++j) {
    digits = design.digits(z.labels[j]);
    for (std::size_t i = 0; i < perm.size(); ++i)
      permuted[i] = digits[static_cast<std::size_t>(perm[i])];
    out.labels[j] = design.index_of_digits(permuted);
  }
  return out;
}

struct RepairOutcome {
  Assignment labels;
  double objective = 0.0;
};

// Nearest-combination decode followed by the cheapest label conversions that
// meet the occupancy floor. A conversion retargets a row to a deficient unit
// combination; donors already at the floor are protected, so no new deficit
// appears and the loop terminates whenever n >= m * ceil(M lambda). Cost ties
// resolve to the smallest row index.
RepairOutcome decode_repair(const Matrix& Y, const Matrix& centers,
                            const Matrix& omega, const DesignMatrix& design,
                            double lambda) {
  const Index n = Y.rows();
  const Index K = centers.rows();
  const int m = design.m;

  RepairOutcome out;
  out.labels.labels.resize(static_cast<std::size_t>(n));
  std::vector<double> sq(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    Index best = 0;
    double best_sq = (Y.row(j) - centers.row(0)).squaredNorm();
    for (Index c = 1; c < K; ++c) {
      const double d = (Y.row(j) - centers.row(c)).squaredNorm();
      if (d < best_sq) {
        best_sq = d;
        best = c;
      }
    }
    out.labels.labels[static_cast<std::size_t>(j)] = best;
    sq[static_cast<std::size_t>(j)] = best_sq;
  }

  const std::vector<Index> units = unit_indices(design);
  std::vector<Index> unit_slot(static_cast<std::size_t>(K), -1);
  for (int i = 0; i < m; ++i) unit_slot[static_cast<std::size_t>(units[static_cast<std::size_t>(i)])] = i;

  const LambdaSeparation ls =
      lambda_separation(out.labels, design.k, m, omega.cols(), lambda);
  std::vector<std::int64_t> counts = ls.counts;
  const std::int64_t need = ls.required;

  for (int i = 0; i < m; ++i) {
    while (counts[static_cast<std::size_t>(i)] < need) {
      Index donor = -1;
      double donor_cost = std::numeric_limits<double>::infinity();
      for (Index j = 0; j < n; ++j) {
        const Index cur = out.labels.labels[static_cast<std::size_t>(j)];
        if (cur == units[static_cast<std::size_t>(i)]) continue;
        const Index slot = unit_slot[static_cast<std::size_t>(cur)];
        if (slot >= 0 && counts[static_cast<std::size_t>(slot)] <= need) continue;
        const double cost =
            (Y.row(j) - omega.row(i)).squaredNorm() - sq[static_cast<std::size_t>(j)];
        if (cost < donor_cost) {
          donor_cost = cost;
          donor = j;
        }
      }
      if (donor < 0) break;  // unreachable when n >= m * need
      const Index old = out.labels.labels[static_cast<std::size_t>(donor)];
      const Index old_slot = unit_slot[static_cast<std::size_t>(old)];
      if (old_slot >= 0) --counts[static_cast<std::size_t>(old_slot)];
      out.labels.labels[static_cast<std::size_t>(donor)] = units[static_cast<std::size_t>(i)];
      ++counts[static_cast<std::size_t>(i)];
      sq[static_cast<std::size_t>(donor)] = (Y.row(donor) - omega.row(i)).squaredNorm();
    }
  }

  out.objective = std::accumulate(sq.begin(), sq.end(), 0.0);
  return out;
}

// Exact counterpart of the greedy repair, affordable when m * need is tiny:
// the occupancy floor pins need rows to each unit combination, so an optimal
// labeling is a nearest-combination decode plus a minimum-regret matching of
// rows to the m * need forced slots (a row in a slot pays the unit's center
// distance instead of its nearest one). A bitmask DP over filled slots finds
// that matching exactly; every other row keeps its nearest combination.
RepairOutcome decode_repair_exact(const Matrix& Y, const Matrix& centers,
                                  const DesignMatrix& design, Index M,
                                  double lambda) {
  const Index n = Y.rows();
  const Index K = centers.rows();
  const int m = design.m;

  RepairOutcome out;
  out.labels.labels.resize(static_cast<std::size_t>(n));
  std::vector<double> sq(static_cast<std::size_t>(n));
  double base = 0.0;
  for (Index j = 0; j < n; ++j) {
    Index best = 0;
    double best_sq = (Y.row(j) - centers.row(0)).squaredNorm();
    for (Index c = 1; c < K; ++c) {
      const double d = (Y.row(j) - centers.row(c)).squaredNorm();
      if (d < best_sq) {
        best_sq = d;
        best = c;
      }
    }
    out.labels.labels[static_cast<std::size_t>(j)] = best;
    sq[static_cast<std::size_t>(j)] = best_sq;
    base += best_sq;
  }

  const LambdaSeparation ls =
      lambda_separation(out.labels, design.k, m, M, lambda);
  const std::int64_t need = ls.required;
  bool satisfied = true;
  for (std::int64_t c : ls.counts)
    if (c < need) satisfied = false;
  if (satisfied) {
    out.objective = base;
    return out;
  }

  const int slots = m * static_cast<int>(need);
  if (slots > 12)
    throw capacity_error("repair: occupancy slot count too large for exact matching");
  if (static_cast<Index>(slots) > n)
    throw validation_error("repair: occupancy floor exceeds the row count");

  const std::vector<Index> units = unit_indices(design);
  std::vector<double> regret(static_cast<std::size_t>(n) * m);
  for (Index j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i)
      regret[static_cast<std::size_t>(j) * m + static_cast<std::size_t>(i)] =
          (Y.row(j) - centers.row(units[static_cast<std::size_t>(i)])).squaredNorm() -
          sq[static_cast<std::size_t>(j)];

  const int states = 1 << slots;
  const double inf = std::numeric_limits<double>::infinity();
  // dp[j][mask]: cheapest extra cost filling `mask` with rows before j
  std::vector<double> dp(static_cast<std::size_t>(n + 1) * states, inf);
  std::vector<std::int8_t> choice(static_cast<std::size_t>(n + 1) * states, -1);
  dp[0] = 0.0;
  for (Index j = 0; j < n; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * states;
    const std::size_t next = row + states;
    for (int mask = 0; mask < states; ++mask) {
      const double cur = dp[row + static_cast<std::size_t>(mask)];
      if (cur == inf) continue;
      if (cur < dp[next + static_cast<std::size_t>(mask)]) {
        dp[next + static_cast<std::size_t>(mask)] = cur;
        choice[next + static_cast<std::size_t>(mask)] = -1;
      }
      for (int s = 0; s < slots; ++s) {
        if (mask & (1 << s)) continue;
        const double extra =
            cur + regret[static_cast<std::size_t>(j) * m +
                         static_cast<std::size_t>(s / static_cast<int>(need))];
        const int to = mask | (1 << s);
        if (extra < dp[next + static_cast<std::size_t>(to)]) {
          dp[next + static_cast<std::size_t>(to)] = extra;
          choice[next + static_cast<std::size_t>(to)] = static_cast<std::int8_t>(s);
        }
      }
    }
  }

  const int full = states - 1;
  out.objective = base + dp[static_cast<std::size_t>(n) * states + full];
  int mask = full;
  for (Index j = n - 1; j >= 0; --j) {
    const std::int8_t s =
        choice[static_cast<std::size_t>(j + 1) * states + static_cast<std::size_t>(mask)];
    if (s >= 0) {
      const int unit = s / static_cast<int>(need);
      out.labels.labels[static_cast<std::size_t>(j)] =
          units[static_cast<std::size_t>(unit)];
      mask &= ~(1 << s);
    }
  }
  return out;
}

double min_pair_distance(const Matrix& values) {
  const Index K = values.rows();
  double best = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < K; ++i)
    for (Index j = i + 1; j < K; ++j)
      best = std::min(best, (values.row(i) - values.row(j)).norm());
  return best;
}

}  // namespace

SimplexFit fit_weights_simplex(const Matrix& Y, const Assignment& z,
                               const DesignMatrix& design, const Matrix* warm) {
  check_labels(Y, z, design);
  const int m = design.m;
  const Index M = Y.cols();
  const Index n = Y.rows();
  if (!is_separable(z, design.k, m))
    throw validation_error(
        "fit: degenerate labeling, some pure-source combination never appears");

  Matrix A(n, m);
  for (Index j = 0; j < n; ++j)
    A.row(j) = design.rows.row(z.labels[static_cast<std::size_t>(j)]);
  const Matrix G = A.transpose() * A;
  const Matrix B = A.transpose() * Y;

  Eigen::SelfAdjointEigenSolver<Matrix> eigen(G);
  const double L = std::max(eigen.eigenvalues().maxCoeff(), 1e-12);
  const auto ldlt = G.ldlt();

  SimplexFit fit;
  fit.raw.resize(m, M);
  for (Index c = 0; c < M; ++c) {
    Vector v = warm != nullptr ? project_to_simplex(warm->col(c))
                               : project_to_simplex(ldlt.solve(B.col(c)));
    double q_prev = v.dot(G * v) - 2.0 * v.dot(B.col(c));
    for (long it = 0; it < kFitCap; ++it) {
      v = project_to_simplex(v - (G * v - B.col(c)) / L);
      const double q = v.dot(G * v) - 2.0 * v.dot(B.col(c));
      ++fit.iterations;
      if (std::abs(q_prev - q) < kFitTol) break;
      q_prev = q;
    }
    fit.raw.col(c) = v;
  }

  const Vector norms = row_norms(fit.raw);
  fit.permutation.resize(static_cast<std::size_t>(m));
  std::iota(fit.permutation.begin(), fit.permutation.end(), 0);
  std::stable_sort(fit.permutation.begin(), fit.permutation.end(),
                   [&norms](int x, int y) { return norms[x] < norms[y]; });
  fit.sorted.resize(m, M);
  for (int i = 0; i < m; ++i)
    fit.sorted.row(i) = fit.raw.row(fit.permutation[static_cast<std::size_t>(i)]);
  return fit;
}

std::vector<std::pair<double, double>> feasible_omega1_intervals(const Alphabet& a,
                                                                 double delta) {
  if (!(delta > 0.0)) throw validation_error("intervals: delta must be > 0");
  const DesignMatrix design = DesignMatrix::build(a, 2);
  const Index K = design.n_rows();

  // Two rows, one column: omega = (t, 1 - t), t in [0, 1/2). A combination
  // (e1, e2) takes the value e2 + (e1 - e2) t, so every pairwise difference
  // is affine in t and each |difference| >= delta cut removes one open
  // interval. The ordering constraint is subsumed by the weak boundary.
  const double upper = 0.5 - delta / (1.0 + 2.0 * a.a_max());
  if (upper < 0.0) return {};
  std::vector<std::pair<double, double>> feasible{{0.0, upper}};

  for (Index i = 0; i < K && !feasible.empty(); ++i) {
    for (Index j = i + 1; j < K && !feasible.empty(); ++j) {
      const double c = design.rows(i, 1) - design.rows(j, 1);
      const double d =
          (design.rows(i, 0) - design.rows(j, 0)) - (design.rows(i, 1) - design.rows(j, 1));
      if (d == 0.0) {
        if (std::abs(c) < delta) feasible.clear();
        continue;
      }
      double lo = (-delta - c) / d;
      double hi = (delta - c) / d;
      if (lo > hi) std::swap(lo, hi);
      std::vector<std::pair<double, double>> next;
      for (const auto& [x, y] : feasible) {
        if (lo >= x && std::min(lo, y) >= x) next.emplace_back(x, std::min(lo, y));
        if (hi <= y && std::max(hi, x) <= y) next.emplace_back(std::max(hi, x), y);
      }
      feasible = std::move(next);
    }
  }
  std::sort(feasible.begin(), feasible.end());
  return feasible;
}

namespace {

// Candidate pool keeping the incumbent minimum plus everything within the tie
// tolerance of it, deduplicated on (labels, weights).
struct CandidatePool {
  double best = std::numeric_limits<double>::infinity();
  std::vector<Minimizer> entries;

  void push(const Assignment& z, const Matrix& omega, double objective) {
    if (objective > best + kTieTolerance) return;
    if (objective < best) {
      best = objective;
      std::erase_if(entries, [this](const Minimizer& e) {
        return e.objective > best + kTieTolerance;
      });
    }
    for (const auto& e : entries)
      if (e.labels == z && (e.omega - omega).lpNorm<Eigen::Infinity>() <= 1e-12)
        return;
    entries.push_back({z, omega, objective});
  }
};

// Exact restricted minimum for one labeling when m == 2, M == 1: the
// objective is quadratic in t and the feasible t-set is a union of closed
// intervals, so clamping the vertex into each interval is exact.
void interval_candidates(const Matrix& Y, const Assignment& z,
                         const DesignMatrix& design, const Alphabet& a,
                         const std::vector<std::pair<double, double>>& intervals,
                         CandidatePool& pool) {
  const Index n = Y.rows();
  double q2 = 0.0, q1 = 0.0;
  std::vector<double> base(static_cast<std::size_t>(n)), gain(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    const std::vector<int> digits = design.digits(z.labels[static_cast<std::size_t>(j)]);
    const double v1 = a.values[static_cast<std::size_t>(digits[0])];
    const double v2 = a.values[static_cast<std::size_t>(digits[1])];
    base[static_cast<std::size_t>(j)] = v2;
    gain[static_cast<std::size_t>(j)] = v1 - v2;
    q2 += gain[static_cast<std::size_t>(j)] * gain[static_cast<std::size_t>(j)];
    q1 += gain[static_cast<std::size_t>(j)] * (base[static_cast<std::size_t>(j)] - Y(j, 0));
  }
  const double vertex = q2 > 0.0 ? -q1 / q2 : 0.0;

  for (const auto& [lo, hi] : intervals) {
    const double t = std::clamp(vertex, lo, hi);
    double objective = 0.0;
    for (Index j = 0; j < n; ++j) {
      const double r = base[static_cast<std::size_t>(j)] +
                       gain[static_cast<std::size_t>(j)] * t - Y(j, 0);
      objective += r * r;
    }
    Matrix omega(2, 1);
    omega(0, 0) = t;
    omega(1, 0) = 1.0 - t;
    pool.push(z, omega, objective);
  }
}

bool feasible_weights(const Matrix& omega, const Alphabet& a,
                      const DesignMatrix& design, double delta) {
  if (!validate_weights(omega).valid()) return false;
  if (wsb(omega, a) < delta) return false;
  const double sep = min_pair_distance(design.rows * omega) /
                     std::sqrt(static_cast<double>(omega.cols()));
  return sep >= delta;
}

// Restricted minimum for one labeling when m == 2, M == 2, used when the
// plain simplex fit lands outside the feasible set: coarse grid over the
// row-1 coordinates with one refinement pass. Approximate by construction;
// callers prune it to labelings that could still win.
void restricted_grid_candidate(const Matrix& Y, const Assignment& z,
                               const DesignMatrix& design, const Alphabet& a,
                               double delta, CandidatePool& pool) {
  const Index n = Y.rows();
  const double h = 5e-3;
  const long steps = std::lround(1.0 / h);

  Matrix omega(2, 2);
  const auto objective_at = [&](double t1, double t2, Matrix& w) {
    w(0, 0) = t1;
    w(0, 1) = t2;
    w(1, 0) = 1.0 - t1;
    w(1, 1) = 1.0 - t2;
    if (!feasible_weights(w, a, design, delta))
      return std::numeric_limits<double>::infinity();
    const Matrix centers = design.rows * w;
    double obj = 0.0;
    for (Index j = 0; j < n; ++j)
      obj += (Y.row(j) - centers.row(z.labels[static_cast<std::size_t>(j)])).squaredNorm();
    return obj;
  };

  double best = std::numeric_limits<double>::infinity();
  double b1 = 0.0, b2 = 0.0;
  for (long i = 0; i <= steps; ++i) {
    for (long j = 0; j <= steps; ++j) {
      const double obj = objective_at(std::min(i * h, 1.0), std::min(j * h, 1.0), omega);
      if (obj < best) {
        best = obj;
        b1 = std::min(i * h, 1.0);
        b2 = std::min(j * h, 1.0);
      }
    }
  }
  if (!std::isfinite(best)) return;

  const double fine = h / 100.0;
  double r1 = b1, r2 = b2;
  for (long i = -100; i <= 100; ++i) {
    for (long j = -100; j <= 100; ++j) {
      const double t1 = std::clamp(b1 + i * fine, 0.0, 1.0);
      const double t2 = std::clamp(b2 + j * fine, 0.0, 1.0);
      const double obj = objective_at(t1, t2, omega);
      if (obj < best) {
        best = obj;
        r1 = t1;
        r2 = t2;
      }
    }
  }
  omega(0, 0) = r1;
  omega(0, 1) = r2;
  omega(1, 0) = 1.0 - r1;
  omega(1, 1) = 1.0 - r2;
  pool.push(z, omega, best);
}

}  // namespace

EstimationResult exact_lse_enumerate(const Matrix& Y, const Alphabet& a, int m,
                                     const SeparationParams& p) {
  validate_params(p);
  if (Y.rows() < 1) throw validation_error("enumerate: empty observation matrix");
  const DesignMatrix design = DesignMatrix::build(a, m);
  const Index K = design.n_rows();
  const Index n = Y.rows();
  const Index M = Y.cols();

  std::int64_t total = 1;
  for (Index j = 0; j < n; ++j) {
    if (total > kEnumerationBudget / K)
      throw capacity_error("enumerate: labeling count (k^m)^n exceeds the budget");
    total *= K;
  }

  const std::int64_t need = lambda_separation({}, design.k, m, M, p.lambda).required;
  if (need * m > n)
    throw validation_error("enumerate: occupancy floor exceeds the row count");

  const bool interval_exact = (m == 2 && M == 1);
  std::vector<std::pair<double, double>> intervals;
  if (interval_exact) {
    intervals = feasible_omega1_intervals(a, p.delta);
    if (intervals.empty())
      throw estimation_failure("enumerate: no feasible weights at this separation level");
  }

  const std::vector<Index> units = unit_indices(design);
  std::vector<int> unit_slot(static_cast<std::size_t>(K), -1);
  for (int i = 0; i < m; ++i)
    unit_slot[static_cast<std::size_t>(units[static_cast<std::size_t>(i)])] = i;

  Assignment z;
  z.labels.assign(static_cast<std::size_t>(n), 0);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(m), 0);

  CandidatePool pool;
  long examined = 0;
  while (true) {
    bool occupancy = true;
    for (int i = 0; i < m; ++i)
      if (counts[static_cast<std::size_t>(i)] < need) occupancy = false;

    if (occupancy) {
      ++examined;
      if (interval_exact) {
        interval_candidates(Y, z, design, a, intervals, pool);
      } else {
        const SimplexFit fit = fit_weights_simplex(Y, z, design);
        const Assignment sorted_z = permute_labels(z, fit.permutation, design);
        if (feasible_weights(fit.sorted, a, design, p.delta)) {
          pool.push(sorted_z, fit.sorted,
                    lse_objective(Y, sorted_z, fit.sorted, design));
        } else if (m == 2 && M == 2) {
          // The simplex-fit objective lower-bounds the restricted optimum,
          // so labelings already beaten by the incumbent are skipped.
          const double bound = lse_objective(Y, z, fit.raw, design);
          if (bound <= pool.best + kTieTolerance)
            restricted_grid_candidate(Y, z, design, a, p.delta, pool);
        }
      }
    }

    // odometer step, last position fastest, unit counts kept incrementally
    Index pos = n - 1;
    while (pos >= 0) {
      auto& label = z.labels[static_cast<std::size_t>(pos)];
      Index slot = unit_slot[static_cast<std::size_t>(label)];
      if (slot >= 0) --counts[static_cast<std::size_t>(slot)];
      ++label;
      if (label < K) {
        slot = unit_slot[static_cast<std::size_t>(label)];
        if (slot >= 0) ++counts[static_cast<std::size_t>(slot)];
        break;
      }
      label = 0;
      --pos;
    }
    if (pos < 0) break;
  }

  if (pool.entries.empty())
    throw estimation_failure("enumerate: no labeling admits feasible weights");

  std::size_t winner = 0;
  for (std::size_t i = 1; i < pool.entries.size(); ++i)
    if (pool.entries[i].objective < pool.entries[winner].objective) winner = i;

  EstimationResult result;
  result.labels = pool.entries[winner].labels;
  result.omega = pool.entries[winner].omega;
  result.objective = pool.entries[winner].objective;
  result.feasible = true;
  result.iterations = examined;
  for (const auto& e : pool.entries)
    if (e.objective <= pool.best + kTieTolerance) result.ties.push_back(e);
  return result;
}

EstimationResult exact_lse_grid(const Matrix& Y, const Alphabet& a, int m,
                                const SeparationParams& p, double h) {
  validate_params(p);
  if (m != 2 || Y.cols() > 2)
    throw capacity_error("grid: oracle covers m == 2 and M <= 2");
  if (!(h > 0.0) || h > 0.5) throw validation_error("grid: step must lie in (0, 0.5]");
  const DesignMatrix design = DesignMatrix::build(a, m);
  const Index n = Y.rows();
  const Index M = Y.cols();

  const std::int64_t need = lambda_separation({}, design.k, m, M, p.lambda).required;
  if (need * m > n)
    throw validation_error("grid: occupancy floor exceeds the row count");

  const long steps = std::lround(1.0 / h);
  long evaluated = 0;

  Matrix omega(2, M);
  const auto objective_at = [&](const double* t, double& obj) {
    for (Index c = 0; c < M; ++c) {
      omega(0, c) = t[c];
      omega(1, c) = 1.0 - t[c];
    }
    ++evaluated;
    if (!feasible_weights(omega, a, design, p.delta)) return false;
    obj = decode_repair_exact(Y, design.rows * omega, design, M, p.lambda).objective;
    return true;
  };

  double best = std::numeric_limits<double>::infinity();
  double best_t[2] = {0.0, 0.0};
  bool found = false;
  const long axis = steps + 1;
  const long points = M == 1 ? axis : axis * axis;
  for (long idx = 0; idx < points; ++idx) {
    double t[2];
    if (M == 1) {
      t[0] = std::min(idx * h, 1.0);
    } else {
      t[0] = std::min((idx / axis) * h, 1.0);
      t[1] = std::min((idx % axis) * h, 1.0);
    }
    double obj;
    if (objective_at(t, obj) && obj < best) {
      best = obj;
      best_t[0] = t[0];
      best_t[1] = M == 2 ? t[1] : 0.0;
      found = true;
    }
  }
  if (!found)
    throw estimation_failure("grid: no grid point satisfies the separation constraints");

  const double fine = h / 100.0;
  const long span = 100;
  double refined[2] = {best_t[0], best_t[1]};
  const long fine_points = M == 1 ? 2 * span + 1 : (2 * span + 1) * (2 * span + 1);
  for (long idx = 0; idx < fine_points; ++idx) {
    double t[2];
    if (M == 1) {
      t[0] = std::clamp(best_t[0] + (idx - span) * fine, 0.0, 1.0);
    } else {
      t[0] = std::clamp(best_t[0] + (idx / (2 * span + 1) - span) * fine, 0.0, 1.0);
      t[1] = std::clamp(best_t[1] + (idx % (2 * span + 1) - span) * fine, 0.0, 1.0);
    }
    double obj;
    if (objective_at(t, obj) && obj < best) {
      best = obj;
      refined[0] = t[0];
      refined[1] = M == 2 ? t[1] : 0.0;
    }
  }

  for (Index c = 0; c < M; ++c) {
    omega(0, c) = refined[c];
    omega(1, c) = 1.0 - refined[c];
  }
  const RepairOutcome outcome =
      decode_repair_exact(Y, design.rows * omega, design, M, p.lambda);

  EstimationResult result;
  result.labels = outcome.labels;
  result.omega = omega;
  result.objective = outcome.objective;
  result.feasible =
      lambda_separation(outcome.labels, design.k, m, M, p.lambda).pass;
  result.iterations = evaluated;
  return result;
}

EstimationResult lloyd_lse(const Matrix& Y, const Alphabet& a, int m,
                           const SeparationParams& p, int restarts,
                           std::uint64_t seed, const Matrix* init) {
  validate_params(p);
  if (restarts < 1) throw validation_error("lloyd: restarts must be >= 1");
  if (Y.rows() < 1) throw validation_error("lloyd: empty observation matrix");
  const DesignMatrix design = DesignMatrix::build(a, m);
  const Index n = Y.rows();
  const Index M = Y.cols();

  const std::int64_t need = lambda_separation({}, design.k, m, M, p.lambda).required;
  if (need * m > n)
    throw validation_error("lloyd: occupancy floor exceeds the row count");

  struct RestartOutcome {
    bool feasible = false;
    double objective = std::numeric_limits<double>::infinity();
    Assignment labels;
    Matrix omega;
    long iterations = 0;
  };
  RestartOutcome best;
  bool have_best = false;

  for (int r = 0; r < restarts; ++r) {
    Matrix w;
    if (r == 0 && init != nullptr) {
      if (init->rows() != m || init->cols() != M)
        throw validation_error("lloyd: init weights have the wrong shape");
      w = *init;
    } else if (r == 0) {
      try {
        w = recover(Y, a, m, p).omega;
      } catch (const std::exception&) {
        Stream st(derive_seed(seed, {static_cast<std::uint64_t>(r)}));
        w = sample_weights_uniform(m, M, st);
      }
    } else {
      Stream st(derive_seed(seed, {static_cast<std::uint64_t>(r)}));
      w = sample_weights_uniform(m, M, st);
    }

    RestartOutcome cur;
    double prev_obj = std::numeric_limits<double>::infinity();
    bool degenerate = false;
    for (int t = 0; t < kLloydCap; ++t) {
      RepairOutcome rep = decode_repair(Y, design.rows * w, w, design, p.lambda);
      Assignment zt = std::move(rep.labels);
      // a fresh decode that regresses past the previous round's objective is
      // discarded, keeping the objective monotone
      if (t > 0 && rep.objective > prev_obj) zt = cur.labels;
      if (!is_separable(zt, design.k, m)) {
        cur.labels = zt;
        cur.objective = rep.objective;
        degenerate = true;
        break;
      }

      const SimplexFit fit = fit_weights_simplex(Y, zt, design, &w);
      zt = permute_labels(zt, fit.permutation, design);
      w = fit.sorted;
      const double obj = lse_objective(Y, zt, w, design);
      ++cur.iterations;
      cur.labels = std::move(zt);
      const bool converged = prev_obj - obj < kLloydTol;
      prev_obj = obj;
      if (converged) break;
    }
    cur.objective = degenerate ? cur.objective : prev_obj;
    cur.omega = w;
    cur.feasible = !degenerate && validate_weights(w).valid() &&
                   std::min(asb(w, a), wsb(w, a)) >= p.delta &&
                   lambda_separation(cur.labels, design.k, m, M, p.lambda).pass;

    const bool better =
        !have_best ||
        std::make_pair(!cur.feasible, cur.objective) <
            std::make_pair(!best.feasible, best.objective);
    if (better) {
      best = std::move(cur);
      have_best = true;
    }
  }

  EstimationResult result;
  result.labels = best.labels;
  result.omega = best.omega;
  result.objective = best.objective;
  result.feasible = best.feasible;
  result.iterations = best.iterations;
  result.restarts_used = restarts;
  return result;
}

double prediction_error(const Assignment& zhat, const Matrix& what,
                        const Matrix& truth, const DesignMatrix& design) {
  const Matrix G = mixture(zhat, what, design);
  if (G.rows() != truth.rows() || G.cols() != truth.cols())
    throw validation_error("prediction error: shape mismatch");
  return (G - truth).squaredNorm() /
         static_cast<double>(truth.rows() * truth.cols());
}

bool classification_flag(const Assignment& zhat, const Assignment& z) {
  return !(zhat == z);
}

double estimation_error(const Assignment& zhat, const Matrix& what,
                        const Assignment& z, const Matrix& omega) {
  const double d = estimation_metric(zhat, what, z, omega);
  return d * d / static_cast<double>(omega.cols());
}

}  // namespace mabs
