#pragma once

#include <vector>

namespace mabs {

// Finite alphabet in normalized form: sorted, values[0] == 0, values[1] == 1.
// offset/scale record the affine map (y - a1) / (a2 - a1) that was applied to
// the raw values, so observations can be mapped the same way.
struct Alphabet {
  std::vector<double> values;
  double offset = 0.0;
  double scale = 1.0;

  // Sorts, checks >= 2 distinct finite values, applies the normalizing map.
  static Alphabet from_values(const std::vector<double>& raw);

  int k() const { return static_cast<int>(values.size()); }
  double a_max() const { return values.back(); }
  double normalize_value(double y) const { return (y - offset) / scale; }
};

struct AlphabetGaps {
  double min_gap;         // smallest |a - a'| over distinct alphabet values
  double second_min_gap;  // smallest |x - y| over distinct signed differences
};

// Gap statistics of a normalized alphabet; both are strictly positive.
AlphabetGaps alphabet_gaps(const Alphabet& a);

}  // namespace mabs
