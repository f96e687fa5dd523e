#pragma once

#include "mabs/assignment.hpp"
#include "mabs/design.hpp"
#include "mabs/types.hpp"

namespace mabs {

// Noise-free observation matrix: row j is design_row(labels[j]) * omega.
Matrix mixture(const Assignment& z, const Matrix& omega, const DesignMatrix& design);

// max over rows of the Euclidean distance between G and H rows.
double rowwise_max_distance(const Matrix& G, const Matrix& H);

}  // namespace mabs
