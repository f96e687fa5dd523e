#include <cmath>
#include <vector>

#include "doctest.h"
#include "mabs/constructions.hpp"
#include "mabs/errors.hpp"
#include "mabs/estimation.hpp"
#include "mabs/instance.hpp"
#include "mabs/mixture.hpp"
#include "mabs/rng.hpp"
#include "mabs/separation.hpp"
#include "mabs/simulation.hpp"

using namespace mabs;

namespace {

Alphabet binary() { return Alphabet::from_values({0.0, 1.0}); }
Alphabet ternary() { return Alphabet::from_values({0.0, 1.0, 2.0}); }

Matrix noisy(const Matrix& truth, double sigma, std::uint64_t seed) {
  Stream rng(seed);
  Matrix Y = truth;
  for (Index j = 0; j < Y.rows(); ++j)
    for (Index c = 0; c < Y.cols(); ++c) Y(j, c) += sigma * rng.normal();
  return Y;
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("simplex projection on hand cases") {
  const Vector shifted = project_to_simplex(vec({0.2, 0.3}));
  CHECK(shifted[0] == doctest::Approx(0.45).epsilon(1e-12));
  CHECK(shifted[1] == doctest::Approx(0.55).epsilon(1e-12));

  const Vector clipped = project_to_simplex(vec({0.0, -1.0 / 3.0}));
  CHECK(clipped[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(clipped[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  // points already on the simplex are fixed
  const Vector fixed = project_to_simplex(vec({0.3, 0.7}));
  CHECK(fixed[0] == 0.3);
  CHECK(fixed[1] == 0.7);

  const Vector vertex = project_to_simplex(vec({5.0, -10.0, 2.0}));
  CHECK(vertex[0] == doctest::Approx(1.0));
  CHECK(vertex[1] == 0.0);
  CHECK(vertex[2] == 0.0);

  Stream rng(31337);
  for (int trial = 0; trial < 20; ++trial) {
    Vector v(3);
    for (Index i = 0; i < 3; ++i) v[i] = 4.0 * rng.uniform() - 2.0;
    const Vector p = project_to_simplex(v);
    CHECK(p.minCoeff() >= 0.0);
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("objective is the squared mixture residual") {
  const DesignMatrix d = DesignMatrix::build(binary(), 2);
  Matrix w(2, 1);
  w << 0.3, 0.7;
  Matrix Y(2, 1);
  Y << 0.1, 0.9;
  CHECK(lse_objective(Y, Assignment{{2, 1}}, w, d) ==
        doctest::Approx(0.08).epsilon(1e-12));
  CHECK(lse_objective(mixture(Assignment{{2, 1}}, w, d), Assignment{{2, 1}}, w,
                      d) == 0.0);
}

TEST_CASE("simplex fit solves the constrained column problem") {
  const DesignMatrix d = DesignMatrix::build(binary(), 2);
  Matrix Y(3, 1);
  Y << 0.32, 0.66, 1.05;
  const Assignment z{{2, 1, 3}};

  // the unconstrained optimum sums past one; on the simplex the column
  // problem reduces to one variable with minimum at t = 0.33
  const SimplexFit fit = fit_weights_simplex(Y, z, d);
  CHECK(fit.raw(0, 0) == doctest::Approx(0.33).epsilon(1e-4));
  CHECK(fit.raw(1, 0) == doctest::Approx(0.67).epsilon(1e-4));
  CHECK(fit.permutation == std::vector<int>{0, 1});
  CHECK(fit.iterations > 0);

  // warm starts converge to the same point
  const SimplexFit warm = fit_weights_simplex(Y, z, d, &fit.raw);
  CHECK(warm.raw(0, 0) == doctest::Approx(fit.raw(0, 0)).epsilon(1e-9));

  CHECK_THROWS_AS(fit_weights_simplex(Y, Assignment{{0, 0, 3}}, d),
                  validation_error);
  CHECK_THROWS_AS(fit_weights_simplex(Y, Assignment{{2, 1}}, d),
                  validation_error);
  CHECK_THROWS_AS(fit_weights_simplex(Y, Assignment{{2, 1, 9}}, d),
                  validation_error);
}

TEST_CASE("simplex fit reports the row sort as a source permutation") {
  const DesignMatrix d = DesignMatrix::build(binary(), 2);
  Matrix Y(3, 1);
  Y << 0.7, 0.3, 1.0;
  // the heavier fitted row comes first here, so sorting swaps the sources
  const SimplexFit fit = fit_weights_simplex(Y, Assignment{{2, 1, 3}}, d);
  CHECK(fit.raw(0, 0) == doctest::Approx(0.7).epsilon(1e-4));
  CHECK(fit.permutation == std::vector<int>{1, 0});
  CHECK(fit.sorted(0, 0) == doctest::Approx(0.3).epsilon(1e-4));
  CHECK(fit.sorted(1, 0) == doctest::Approx(0.7).epsilon(1e-4));
}

TEST_CASE("feasible row-1 interval oracle") {
  // ternary alphabet at level 0.1: the cut |3t - 1| < 0.1 splits the set
  const auto ternary_set = feasible_omega1_intervals(ternary(), 0.1);
  REQUIRE(ternary_set.size() == 2);
  CHECK(std::abs(ternary_set[0].first - 0.1) <= 1e-9);
  CHECK(std::abs(ternary_set[0].second - 0.3) <= 1e-9);
  CHECK(std::abs(ternary_set[1].first - 11.0 / 30.0) <= 1e-9);
  CHECK(std::abs(ternary_set[1].second - 0.45) <= 1e-9);

  const auto binary_set = feasible_omega1_intervals(binary(), 0.1);
  REQUIRE(binary_set.size() == 1);
  CHECK(std::abs(binary_set[0].first - 0.1) <= 1e-9);
  CHECK(std::abs(binary_set[0].second - 0.45) <= 1e-9);

  CHECK(feasible_omega1_intervals(binary(), 0.6).empty());
  CHECK_THROWS_AS(feasible_omega1_intervals(binary(), 0.0), validation_error);
}

TEST_CASE("enumeration reports both minimizers of the symmetric tie input") {
  Matrix Y(2, 1);
  Y << -1.0 / 3.0, 0.0;
  const SeparationParams p{0.1, 1.0, 0.0};
  const EstimationResult r = exact_lse_enumerate(Y, ternary(), 2, p);

  CHECK(r.feasible);
  CHECK(r.objective == doctest::Approx(802.0 / 900.0).epsilon(1e-10));
  REQUIRE(r.ties.size() == 2);
  // the restriction vertex 1/3 sits midway inside the excluded gap, so both
  // flanking endpoints minimize with exactly equal objectives
  CHECK(std::abs(r.ties[0].omega(0, 0) - 0.3) <= 1e-9);
  CHECK(std::abs(r.ties[0].omega(1, 0) - 0.7) <= 1e-9);
  CHECK(std::abs(r.ties[1].omega(0, 0) - 11.0 / 30.0) <= 1e-9);
  CHECK(std::abs(r.ties[1].omega(1, 0) - 19.0 / 30.0) <= 1e-9);
  CHECK(std::abs(r.ties[0].objective - r.ties[1].objective) <= 1e-8);
  CHECK(r.ties[0].labels == Assignment{{3, 1}});
  CHECK(r.ties[1].labels == Assignment{{3, 1}});

  // the grid oracle lands on the same optimum within its resolution
  const EstimationResult g = exact_lse_grid(Y, ternary(), 2, p);
  CHECK(g.feasible);
  CHECK(std::abs(g.objective - r.objective) <= 1e-6);
}

TEST_CASE("noiseless estimation returns the exact truth uniquely") {
  Matrix w(2, 1);
  w << 0.3, 0.7;
  const Assignment z{{2, 1, 3, 0, 2}};
  const SeparationParams p{0.15, 1.0, 0.0};
  const Instance inst = make_instance(binary(), w, z, 0.0, p, 0);

  const EstimationResult r = exact_lse_enumerate(inst.observations, binary(), 2, p);
  CHECK(r.objective <= 1e-12);
  CHECK(r.labels == z);
  CHECK((r.omega - w).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(r.ties.size() == 1);

  const EstimationResult l = lloyd_lse(inst.observations, binary(), 2, p, 3, 7);
  CHECK(l.feasible);
  CHECK(l.objective <= 1e-10);
  CHECK(l.labels == z);
}

TEST_CASE("enumeration and grid agree on noisy inputs") {
  // one column
  {
    Matrix w(2, 1);
    w << 0.3, 0.7;
    const Assignment z{{2, 1, 3, 0, 2}};
    const SeparationParams p{0.15, 1.0, 0.0};
    const Instance inst = make_instance(binary(), w, z, 0.0, p, 0);
    const Matrix Y = noisy(inst.truth, 0.08, 1001);

    const EstimationResult e = exact_lse_enumerate(Y, binary(), 2, p);
    const EstimationResult g = exact_lse_grid(Y, binary(), 2, p);
    CHECK(std::abs(e.objective - g.objective) <= 1e-6);

    const EstimationResult l = lloyd_lse(Y, binary(), 2, p, 5, 11);
    CHECK(l.objective >= e.objective - 1e-9);
    CHECK(l.objective <= e.objective + 0.01 * std::max(1.0, e.objective));
  }
  // two columns
  {
    Matrix w(2, 2);
    w << 0.3, 0.1, 0.7, 0.9;
    const Assignment z{{2, 1, 3, 0, 2, 1}};
    const SeparationParams p{0.15, 1.0, 0.0};
    const Instance inst = make_instance(binary(), w, z, 0.0, p, 0);
    const Matrix Y = noisy(inst.truth, 0.08, 2002);

    const EstimationResult e = exact_lse_enumerate(Y, binary(), 2, p);
    const EstimationResult g = exact_lse_grid(Y, binary(), 2, p);
    CHECK(std::abs(e.objective - g.objective) <= 1e-6);

    const EstimationResult l = lloyd_lse(Y, binary(), 2, p, 5, 11);
    CHECK(l.objective >= e.objective - 1e-9);
  }
}

TEST_CASE("alternating estimator is deterministic in the seed") {
  Matrix w(2, 2);
  w << 0.3, 0.1, 0.7, 0.9;
  const Assignment z{{2, 1, 3, 0, 2, 1, 3, 2}};
  const SeparationParams p{0.15, 0.5, 0.0};
  const Instance inst = make_instance(binary(), w, z, 0.0, p, 0);
  const Matrix Y = noisy(inst.truth, 0.1, 77);

  const EstimationResult a = lloyd_lse(Y, binary(), 2, p, 6, 123);
  const EstimationResult b = lloyd_lse(Y, binary(), 2, p, 6, 123);
  CHECK(a.objective == b.objective);
  CHECK(a.labels == b.labels);
  CHECK((a.omega - b.omega).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("an unreachable separation level is flagged, not hidden") {
  Matrix w(2, 1);
  w << 0.45, 0.55;
  const Assignment z{{2, 1, 3, 0}};
  SeparationParams p{0.4, 0.5, 0.0};
  const Instance inst = make_instance(binary(), w, z, 0.0, p, 0);

  const EstimationResult l = lloyd_lse(inst.observations, binary(), 2, p, 4, 5);
  CHECK_FALSE(l.feasible);
  CHECK(std::isfinite(l.objective));

  // the exhaustive oracle refuses outright: no weights reach the level
  CHECK_THROWS_AS(exact_lse_enumerate(inst.observations, binary(), 2, p),
                  estimation_failure);
}

TEST_CASE("estimator domain guards") {
  Matrix Y(4, 1);
  Y << 0.1, 0.2, 0.8, 0.9;
  const SeparationParams p{0.1, 1.0, 0.0};

  // labeling count (k^m)^n above the cap
  Matrix big(6, 1);
  big.setConstant(0.5);
  CHECK_THROWS_AS(exact_lse_enumerate(big, ternary(), 2, p), capacity_error);

  // occupancy floor above the row count
  Matrix tiny(1, 1);
  tiny << 0.5;
  CHECK_THROWS_AS(exact_lse_enumerate(tiny, binary(), 2, p), validation_error);
  CHECK_THROWS_AS(lloyd_lse(tiny, binary(), 2, p, 2, 0), validation_error);

  CHECK_THROWS_AS(exact_lse_grid(Y, binary(), 3, p), capacity_error);
  CHECK_THROWS_AS(exact_lse_grid(Matrix::Zero(4, 3), binary(), 2, p),
                  capacity_error);
  CHECK_THROWS_AS(exact_lse_grid(Y, binary(), 2, p, 0.9), validation_error);
  CHECK_THROWS_AS(lloyd_lse(Y, binary(), 2, p, 0, 0), validation_error);
  Matrix bad_init(3, 1);
  bad_init.setConstant(1.0 / 3.0);
  CHECK_THROWS_AS(lloyd_lse(Y, binary(), 2, p, 2, 0, &bad_init),
                  validation_error);
}

TEST_CASE("error functionals") {
  const DesignMatrix d = DesignMatrix::build(binary(), 2);
  Matrix w(2, 1);
  w << 0.3, 0.7;
  const Assignment z{{2, 1, 3}};
  const Matrix truth = mixture(z, w, d);

  CHECK(prediction_error(z, w, truth, d) == 0.0);
  CHECK_FALSE(classification_flag(z, z));
  CHECK(estimation_error(z, w, z, w) == 0.0);

  // shifting row 1 by t changes exactly the rows that load on source 1
  Matrix shifted = w;
  shifted(0, 0) += 0.05;
  CHECK(prediction_error(z, shifted, truth, d) ==
        doctest::Approx(2.0 * 0.05 * 0.05 / 3.0).epsilon(1e-12));

  const Assignment z2{{2, 1, 0}};
  CHECK(classification_flag(z2, z));
  // differing labelings alone cost (sqrt(M))^2 / M = 1
  CHECK(estimation_error(z2, w, z, w) == doctest::Approx(1.0));
  CHECK(estimation_error(z, shifted, z, w) ==
        doctest::Approx(0.05 * 0.05).epsilon(1e-12));
}
