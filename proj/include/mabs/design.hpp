#pragma once

#include <cstdint>
#include <vector>

#include "mabs/alphabet.hpp"
#include "mabs/types.hpp"

namespace mabs {

// Hard cap on the number of alphabet combinations a single operation may
// enumerate. Everything here is desk scale; past this the combinatorics win.
inline constexpr std::int64_t kDesignRowBudget = 1'000'000;

// Checked k^m; throws capacity_error beyond kDesignRowBudget.
std::int64_t design_row_count(int k, int m);

// All k^m alphabet combinations, one per row, in counting order with the last
// coordinate moving fastest (equivalently: lexicographic over tuples).
struct DesignMatrix {
  Matrix rows;  // k^m x m
  int k = 0;
  int m = 0;

  static DesignMatrix build(const Alphabet& a, int m);

  Index n_rows() const { return rows.rows(); }

  // Row index of the i-th unit combination (value 1 at coordinate i, zeros
  // elsewhere), i in [1, m]. Equals k^(m-i) in counting order.
  Index unit_row_index(int i) const;

  std::vector<int> digits(Index row) const;
  Index index_of_digits(const std::vector<int>& d) const;
};

}  // namespace mabs
