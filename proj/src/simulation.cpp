#include "mabs/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <vector>

#include "mabs/design.hpp"
#include "mabs/errors.hpp"
#include "mabs/estimation.hpp"
#include "mabs/io.hpp"
#include "mabs/separation.hpp"
#include "mabs/weights.hpp"

namespace mabs {

Matrix sample_weights_uniform(int m, Index M, Stream& rng) {
  if (m < 1) throw validation_error("sampler: m must be >= 1");
  if (M < 1) throw validation_error("sampler: M must be >= 1");
  if (m == 1) return Matrix::Ones(1, M);

  for (int attempt = 0; attempt < 100; ++attempt) {
    Matrix w(m, M);
    bool degenerate = false;
    for (Index c = 0; c < M; ++c) {
      double sum = 0.0;
      for (int i = 0; i < m; ++i) {
        const double e = -std::log(1.0 - rng.uniform());
        w(i, c) = e;
        sum += e;
      }
      if (!(sum > 0.0)) degenerate = true;
      else w.col(c) /= sum;
    }
    if (degenerate) continue;

    const Vector norms = row_norms(w);
    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&norms](int x, int y) { return norms[x] < norms[y]; });
    bool tied = norms[order[0]] <= 0.0;
    for (int i = 1; i < m; ++i)
      if (norms[order[static_cast<std::size_t>(i)]] ==
          norms[order[static_cast<std::size_t>(i - 1)]])
        tied = true;
    if (tied) continue;

    Matrix out(m, M);
    for (int i = 0; i < m; ++i)
      out.row(i) = w.row(order[static_cast<std::size_t>(i)]);
    return out;
  }
  throw estimation_failure("sampler: row-norm ties persisted across 100 draws");
}

Assignment sample_assignment(Index n, int k, int m, Index M, double lambda,
                             Stream& rng) {
  if (n < 1) throw validation_error("assignment sampler: n must be >= 1");
  const std::int64_t K = design_row_count(k, m);
  const std::int64_t need = lambda_separation({}, k, m, M, lambda).required;
  if (need * m > n)
    throw validation_error("assignment sampler: occupancy floor exceeds n");

  std::vector<std::int64_t> units(static_cast<std::size_t>(m));
  std::int64_t p = 1;
  for (int i = m; i >= 1; --i) {
    units[static_cast<std::size_t>(i - 1)] = p;
    p *= k;
  }

  Assignment z;
  z.labels.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < m; ++i)
    for (std::int64_t c = 0; c < need; ++c)
      z.labels.push_back(units[static_cast<std::size_t>(i)]);
  while (z.labels.size() < static_cast<std::size_t>(n))
    z.labels.push_back(static_cast<std::int64_t>(
        rng.integer(static_cast<std::uint64_t>(K))));

  for (std::size_t i = z.labels.size() - 1; i > 0; --i) {
    const std::size_t j =
        static_cast<std::size_t>(rng.integer(static_cast<std::uint64_t>(i + 1)));
    std::swap(z.labels[i], z.labels[j]);
  }
  return z;
}

Instance simulate_instance(const Alphabet& a, int m, const SimPoint& pt,
                           const SeparationParams& params, std::uint64_t seed) {
  validate_params(params);
  if (m < 1) throw validation_error("simulate: m must be >= 1");
  if (pt.n < 1 || pt.M < 1) throw validation_error("simulate: n and M must be >= 1");
  if (pt.sigma < 0.0) throw validation_error("simulate: sigma must be >= 0");

  Stream st(seed);
  constexpr int kRejectionCap = 10'000;
  Matrix w;
  bool accepted = false;
  for (int attempt = 0; attempt < kRejectionCap; ++attempt) {
    w = sample_weights_uniform(m, pt.M, st);
    if (std::min(asb(w, a), wsb(w, a)) >= params.delta) {
      accepted = true;
      break;
    }
  }
  if (!accepted)
    throw validation_error(
        "simulate: separation level too large, 0 of 10000 weight draws reached "
        "min(asb, wsb) >= delta");

  const Assignment z = sample_assignment(pt.n, a.k(), m, pt.M, params.lambda, st);
  Instance inst = make_instance(a, w, z, pt.sigma, params, seed);
  if (pt.sigma > 0.0)
    for (Index j = 0; j < inst.n; ++j)
      for (Index c = 0; c < inst.M; ++c)
        inst.observations(j, c) = inst.truth(j, c) + pt.sigma * st.normal();
  return inst;
}

double pilot_delta(const Alphabet& a, int m, Index M, std::uint64_t seed) {
  constexpr int kPilotDraws = 200;
  Stream st(derive_seed(seed, {1000003ULL}));
  std::vector<double> levels;
  levels.reserve(kPilotDraws);
  for (int i = 0; i < kPilotDraws; ++i) {
    const Matrix w = sample_weights_uniform(m, M, st);
    levels.push_back(std::min(asb(w, a), wsb(w, a)));
  }
  std::sort(levels.begin(), levels.end());
  return levels[kPilotDraws / 10 - 1];  // nearest-rank 10th percentile
}

namespace {

constexpr std::uint64_t kPilotTag = 0x70u;
constexpr std::uint64_t kEstimatorTag = 0x65u;

struct GridPoint {
  Index n;
  Index M;
  double sigma;
  double delta;
  double lambda;
};

}  // namespace

SweepResult run_sweep(const SweepConfig& config) {
  if (config.m < 1) throw validation_error("sweep: m must be >= 1");
  if (config.replicates < 1)
    throw validation_error("sweep: replicates must be >= 1");
  if (config.restarts < 1) throw validation_error("sweep: restarts must be >= 1");
  if (config.n_values.empty() || config.M_values.empty() ||
      config.sigma_values.empty())
    throw validation_error("sweep: every grid axis needs at least one value");
  if (config.estimator != "lloyd" && config.estimator != "exact-enum" &&
      config.estimator != "exact-grid")
    throw validation_error("sweep: unknown estimator " + config.estimator);

  const Alphabet& a = config.alphabet;
  const int m = config.m;
  const std::int64_t K = design_row_count(a.k(), m);

  // delta defaults come from one pilot per M, so every point at the same M
  // sees the same separation level
  std::map<Index, double> pilot;
  for (const Index M : config.M_values)
    if (config.delta <= 0.0 && pilot.find(M) == pilot.end())
      pilot[M] = pilot_delta(a, m, M,
                             derive_seed(config.seed,
                                         {static_cast<std::uint64_t>(M), kPilotTag}));

  std::vector<GridPoint> points;
  for (const Index n : config.n_values)
    for (const Index M : config.M_values)
      for (const double sigma : config.sigma_values) {
        GridPoint pt;
        pt.n = n;
        pt.M = M;
        pt.sigma = sigma;
        pt.lambda = config.lambda > 0.0 ? config.lambda
                                        : 1.0 / static_cast<double>(M);
        pt.delta = config.delta > 0.0 ? config.delta : pilot.at(M);
        const std::int64_t need =
            lambda_separation({}, a.k(), m, M, pt.lambda).required;
        if (need * m > n)
          throw validation_error("sweep: occupancy floor exceeds n at a grid point");
        points.push_back(pt);
      }

  const long total =
      static_cast<long>(points.size()) * static_cast<long>(config.replicates);
  SweepResult result;
  result.cells.resize(static_cast<std::size_t>(total));

#pragma omp parallel for schedule(dynamic)
  for (long t = 0; t < total; ++t) {
    const std::size_t pi = static_cast<std::size_t>(t) /
                           static_cast<std::size_t>(config.replicates);
    const int rep = static_cast<int>(t % config.replicates);
    const GridPoint& pt = points[pi];
    const std::uint64_t cell_seed = derive_seed(
        config.seed, {static_cast<std::uint64_t>(pi), static_cast<std::uint64_t>(rep)});

    SweepCell cell;
    cell.n = pt.n;
    cell.M = pt.M;
    cell.sigma = pt.sigma;
    cell.delta = pt.delta;
    cell.lambda = pt.lambda;
    cell.replicate = rep;
    cell.seed = cell_seed;

    std::string actual = config.estimator;
    if (actual == "exact-enum") {
      double labelings = static_cast<double>(pt.n) * std::log(static_cast<double>(K));
      if (labelings > std::log(static_cast<double>(kEnumerationBudget)))
        actual = "lloyd";
    }
    if (actual == "exact-grid" && !(m == 2 && pt.M <= 2)) actual = "lloyd";
    cell.estimator = actual;

    try {
      SeparationParams params;
      params.delta = pt.delta;
      params.lambda = pt.lambda;
      params.epsilon = 0.0;
      SimPoint sp;
      sp.n = pt.n;
      sp.M = pt.M;
      sp.sigma = pt.sigma;
      const Instance inst = simulate_instance(a, m, sp, params, cell_seed);
      const DesignMatrix design = DesignMatrix::build(a, m);

      EstimationResult est;
      if (actual == "exact-enum") {
        est = exact_lse_enumerate(inst.observations, a, m, params);
      } else if (actual == "exact-grid") {
        est = exact_lse_grid(inst.observations, a, m, params);
      } else {
        est = lloyd_lse(inst.observations, a, m, params, config.restarts,
                        derive_seed(cell_seed, {kEstimatorTag}));
      }

      cell.pred_err = prediction_error(est.labels, est.omega, inst.truth, design);
      cell.class_err = classification_flag(est.labels, inst.labels) ? 1.0 : 0.0;
      cell.est_err = estimation_error(est.labels, est.omega, inst.labels, inst.omega);
      cell.feasible = est.feasible;
    } catch (const std::exception&) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      cell.pred_err = nan;
      cell.class_err = nan;
      cell.est_err = nan;
      cell.feasible = false;
    }
    result.cells[static_cast<std::size_t>(t)] = cell;
  }

  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const GridPoint& pt = points[pi];
    SweepRecord rec;
    rec.n = pt.n;
    rec.M = pt.M;
    rec.sigma = pt.sigma;
    rec.delta = pt.delta;
    rec.lambda = pt.lambda;
    std::vector<double> pred, cls, est;
    for (int rep = 0; rep < config.replicates; ++rep) {
      const SweepCell& cell =
          result.cells[pi * static_cast<std::size_t>(config.replicates) +
                       static_cast<std::size_t>(rep)];
      if (std::isfinite(cell.pred_err)) {
        pred.push_back(cell.pred_err);
        cls.push_back(cell.class_err);
        est.push_back(cell.est_err);
      }
    }
    rec.count = static_cast<int>(pred.size());
    const auto mean_se = [](const std::vector<double>& v, double& mean, double& se) {
      if (v.empty()) {
        mean = std::numeric_limits<double>::quiet_NaN();
        se = std::numeric_limits<double>::quiet_NaN();
        return;
      }
      mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      if (v.size() < 2) {
        se = 0.0;
        return;
      }
      double ss = 0.0;
      for (const double x : v) ss += (x - mean) * (x - mean);
      se = std::sqrt(ss / static_cast<double>(v.size() - 1)) /
           std::sqrt(static_cast<double>(v.size()));
    };
    mean_se(pred, rec.mean_pred, rec.se_pred);
    mean_se(cls, rec.mean_class, rec.se_class);
    mean_se(est, rec.mean_est, rec.se_est);
    result.records.push_back(rec);
  }
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "n,M,sigma,delta,lambda,estimator,replicate,pred_err,class_err,"
         "est_err,feasible,seed\n";
  for (const SweepCell& c : result.cells) {
    out << c.n << ',' << c.M << ',' << format_double(c.sigma) << ','
        << format_double(c.delta) << ',' << format_double(c.lambda) << ','
        << c.estimator << ',' << c.replicate << ',' << format_double(c.pred_err)
        << ',' << format_double(c.class_err) << ',' << format_double(c.est_err)
        << ',' << (c.feasible ? 1 : 0) << ',' << c.seed << '\n';
  }
  return out.str();
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
  std::ofstream out(path);
  if (!out) throw validation_error("sweep: cannot open " + path + " for writing");
  out << sweep_csv(result);
}

DecayFit fit_decay(const std::vector<double>& x, const std::vector<double>& y,
                   const std::string& model) {
  if (model != "exponential" && model != "power")
    throw validation_error("decay fit: model must be exponential or power");
  if (x.size() != y.size())
    throw validation_error("decay fit: x and y lengths differ");
  if (x.size() < 3) throw validation_error("decay fit: needs at least 3 points");

  const bool log_x = model == "power";
  std::vector<double> xs(x.size()), ys(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0))
      throw validation_error("decay fit: y values must be positive");
    if (log_x && !(x[i] > 0.0))
      throw validation_error("decay fit: x values must be positive for a power fit");
    xs[i] = log_x ? std::log(x[i]) : x[i];
    ys[i] = std::log(y[i]);
  }

  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0.0) throw validation_error("decay fit: abscissa is degenerate");

  DecayFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
    ss_tot += (ys[i] - my) * (ys[i] - my);
  }
  fit.r_squared = ss_tot <= 1e-30 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

}  // namespace mabs
