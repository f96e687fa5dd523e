#pragma once

#include <vector>

#include "mabs/alphabet.hpp"
#include "mabs/assignment.hpp"
#include "mabs/design.hpp"
#include "mabs/separation.hpp"
#include "mabs/types.hpp"

namespace mabs {

inline constexpr int kMaxClusterReps = 64;
inline constexpr std::int64_t kMaxSubsetCombinations = 1'000'000;

struct DecodeResult {
  Assignment labels;
  std::vector<double> residuals;  // attained distance per row
  double max_residual = 0.0;
};

// Nearest-combination labeling of every observation row; ties resolve to the
// smallest design-row index. Rows are independent, so the OpenMP kernel's
// output is bitwise equal to the serial reference.
DecodeResult decode_rows(const Matrix& Y, const Matrix& omega,
                         const DesignMatrix& design);

namespace serial {
DecodeResult decode_rows(const Matrix& Y, const Matrix& omega,
                         const DesignMatrix& design);
}  // namespace serial

struct RecoveryResult {
  Assignment labels;
  Matrix omega;
  double residual = 0.0;  // max rowwise decode distance against the certified weights
  bool certified = false;
};

// Exact recovery from rowwise eps-perturbed observations of a separated
// instance. Requires eps < sqrt(M) delta / (1 + m a_k); under that contract
// the certified output has the exact selection and weight rows within eps.
//
// Pipeline: cluster rows at radius 2 eps (first occurrence is the
// representative), scan m-subsets of representatives whose rows sum to one
// within m*eps entrywise and clear both separation boundaries at
// delta - (1 + m a_k) eps / sqrt(M), then certify by decoding every row
// within (1 + m a_k) eps and checking the lambda occupancy floor. Composite
// rows inherit up to m a_k eps of center error on top of their own
// perturbation, hence the widened decode acceptance.
RecoveryResult recover(const Matrix& Y, const Alphabet& a, int m,
                       const SeparationParams& p);

}  // namespace mabs
