#pragma once

#include <cstdint>
#include <vector>

#include "mabs/types.hpp"

namespace mabs {

// Selection stored as a label sequence: observation row j takes design row
// labels[j]. Equality of selections is equality of label sequences.
struct Assignment {
  std::vector<std::int64_t> labels;

  Index size() const { return static_cast<Index>(labels.size()); }
  bool operator==(const Assignment&) const = default;
};

// Occurrences of each unit combination, index i in [1, m] -> counts[i-1].
std::vector<std::int64_t> unit_counts(const Assignment& z, int k, int m);

// Every unit combination appears at least once.
bool is_separable(const Assignment& z, int k, int m);

struct LambdaSeparation {
  bool pass = false;
  std::vector<std::int64_t> counts;
  std::int64_t required = 0;  // ceil(M * lambda), computed with a 1e-12 guard
};

// Every unit combination appears at least ceil(M * lambda) times.
LambdaSeparation lambda_separation(const Assignment& z, int k, int m, Index M,
                                   double lambda);

}  // namespace mabs
