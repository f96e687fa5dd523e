#include "mabs/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mabs/errors.hpp"
#include "mabs/mixture.hpp"

namespace mabs {

namespace {

DecodeResult decode_impl(const Matrix& Y, const Matrix& omega,
                         const DesignMatrix& design, bool parallel) {
  if (design.m != omega.rows())
    throw validation_error("decode: design arity does not match weight rows");
  if (Y.cols() != omega.cols())
    throw validation_error("decode: column counts differ");

  const Matrix centers = design.rows * omega;  // k^m x M
  const Index n = Y.rows();
  const Index K = centers.rows();

  DecodeResult r;
  r.labels.labels.resize(static_cast<std::size_t>(n));
  r.residuals.resize(static_cast<std::size_t>(n));

#pragma omp parallel for schedule(static) if (parallel)
  for (Index j = 0; j < n; ++j) {
    double best = std::numeric_limits<double>::infinity();
    Index best_label = 0;
    for (Index e = 0; e < K; ++e) {
      const double dist = (Y.row(j) - centers.row(e)).norm();
      if (dist < best) {  // strict: ties keep the smallest index
        best = dist;
        best_label = e;
      }
    }
    r.labels.labels[static_cast<std::size_t>(j)] = best_label;
    r.residuals[static_cast<std::size_t>(j)] = best;
  }

  r.max_residual = 0.0;
  for (double d : r.residuals) r.max_residual = std::max(r.max_residual, d);
  return r;
}

}  // namespace

DecodeResult decode_rows(const Matrix& Y, const Matrix& omega,
                         const DesignMatrix& design) {
  return decode_impl(Y, omega, design, true);
}

namespace serial {
DecodeResult decode_rows(const Matrix& Y, const Matrix& omega,
                         const DesignMatrix& design) {
  return decode_impl(Y, omega, design, false);
}
}  // namespace serial

namespace {

// Next m-combination of {0, ..., count-1} in lexicographic order.
bool next_combination(std::vector<int>& c, int count) {
  const int m = static_cast<int>(c.size());
  for (int i = m - 1; i >= 0; --i) {
    if (c[i] < count - m + i) {
      ++c[i];
      for (int j = i + 1; j < m; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

std::int64_t combination_count(int count, int m) {
  std::int64_t c = 1;
  for (int i = 0; i < m; ++i) {
    c = c * (count - i) / (i + 1);
    if (c > kMaxSubsetCombinations) return kMaxSubsetCombinations + 1;
  }
  return c;
}

}  // namespace

RecoveryResult recover(const Matrix& Y, const Alphabet& a, int m,
                       const SeparationParams& p) {
  validate_params(p);
  if (m < 1) throw validation_error("recover: m must be >= 1");
  if (Y.rows() < 1) throw validation_error("recover: empty observations");

  const Index M = Y.cols();
  const Index n = Y.rows();
  const double contract =
      std::sqrt(static_cast<double>(M)) * p.delta / (1.0 + m * a.a_max());
  if (p.epsilon >= contract)
    throw validation_error(
        "recover: epsilon >= sqrt(M) delta / (1 + m a_k); the perturbation "
        "level breaks the recovery contract");

  // eps = 0 means noiseless input; dot products recomputed along different
  // orders still differ in the last bits, so keep a tiny numeric floor.
  const double eps = std::max(p.epsilon, 1e-10);
  const double slack = (1.0 + m * a.a_max()) * eps / std::sqrt(static_cast<double>(M));
  const double accept = (1.0 + m * a.a_max()) * eps;

  // 1. Cluster rows at radius 2 eps; the first row seen is the representative.
  std::vector<Index> reps;
  for (Index j = 0; j < n; ++j) {
    bool merged = false;
    for (Index r : reps) {
      if ((Y.row(j) - Y.row(r)).norm() <= 2.0 * eps) {
        merged = true;
        break;
      }
    }
    if (!merged) {
      if (static_cast<int>(reps.size()) == kMaxClusterReps)
        throw capacity_error("recover: more than 64 cluster representatives");
      reps.push_back(j);
    }
  }

  const int R = static_cast<int>(reps.size());
  if (combination_count(R, m) > kMaxSubsetCombinations)
    throw capacity_error("recover: candidate subset count exceeds 1e6");

  const DesignMatrix design = DesignMatrix::build(a, m);

  struct Candidate {
    Assignment labels;
    Matrix omega;
    double residual;
    std::int64_t subset;
  };
  std::vector<Candidate> certified;
  double best_failure = std::numeric_limits<double>::infinity();

  std::vector<int> combo(static_cast<std::size_t>(m));
  std::iota(combo.begin(), combo.end(), 0);
  std::int64_t subset_index = -1;

  if (R >= m) do {
    ++subset_index;

    // candidate weights: the subset's rows sorted by norm
    Matrix cand(m, M);
    for (int i = 0; i < m; ++i)
      cand.row(i) = Y.row(reps[static_cast<std::size_t>(combo[static_cast<std::size_t>(i)])]);
    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
      return cand.row(x).norm() < cand.row(y).norm();
    });
    Matrix sorted(m, M);
    for (int i = 0; i < m; ++i) sorted.row(i) = cand.row(order[static_cast<std::size_t>(i)]);

    // rows of a weight matrix sum to one in every column
    const double sum_dev = (sorted.colwise().sum().array() - 1.0).abs().maxCoeff();
    if (sum_dev > m * eps) continue;

    // strict norm ordering, then both separation boundaries with slack
    bool ordered = true;
    for (int i = 1; i < m; ++i)
      if (!(sorted.row(i).norm() > sorted.row(i - 1).norm())) ordered = false;
    if (!ordered) continue;
    if (wsb(sorted, a) < p.delta - slack) continue;
    if (asb(sorted, a) < p.delta - slack) continue;

    // certification: every row decodes within the widened acceptance and the
    // induced labeling meets the occupancy floor
    const DecodeResult dec = decode_rows(Y, sorted, design);
    if (dec.max_residual <= accept) {
      const LambdaSeparation ls = lambda_separation(dec.labels, a.k(), m, M, p.lambda);
      if (ls.pass) {
        certified.push_back({dec.labels, sorted, dec.max_residual, subset_index});
        continue;
      }
    }
    best_failure = std::min(best_failure, dec.max_residual);
  } while (next_combination(combo, R));

  if (certified.empty())
    throw recovery_failure(
        "recover: no candidate certified (best residual " +
            std::to_string(best_failure) + ")",
        best_failure);
  if (certified.size() > 1)
    throw recovery_failure(
        "recover: multiple certified candidates; the delta/epsilon contract "
        "was violated upstream",
        certified.front().residual);

  RecoveryResult out;
  out.labels = std::move(certified.front().labels);
  out.omega = std::move(certified.front().omega);
  out.residual = certified.front().residual;
  out.certified = true;
  return out;
}

}  // namespace mabs
