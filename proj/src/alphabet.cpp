#include "mabs/alphabet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mabs/errors.hpp"

namespace mabs {

Alphabet Alphabet::from_values(const std::vector<double>& raw) {
  std::vector<double> v;
  v.reserve(raw.size());
  for (double x : raw) {
    if (!std::isfinite(x)) throw validation_error("alphabet: non-finite value");
    v.push_back(x);
  }
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  if (v.size() < 2) throw validation_error("alphabet: need at least 2 distinct values");

  Alphabet a;
  a.offset = v[0];
  a.scale = v[1] - v[0];
  a.values.reserve(v.size());
  for (double x : v) a.values.push_back((x - a.offset) / a.scale);
  a.values[0] = 0.0;
  a.values[1] = 1.0;
  return a;
}

AlphabetGaps alphabet_gaps(const Alphabet& a) {
  const auto& v = a.values;
  const int k = a.k();

  double min_gap = std::numeric_limits<double>::infinity();
  std::vector<double> diffs;  // signed difference set
  diffs.reserve(static_cast<std::size_t>(k) * k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      diffs.push_back(v[i] - v[j]);
      min_gap = std::min(min_gap, std::abs(v[i] - v[j]));
    }
  }
  std::sort(diffs.begin(), diffs.end());
  diffs.erase(std::unique(diffs.begin(), diffs.end()), diffs.end());

  double second = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < diffs.size(); ++i)
    for (std::size_t j = i + 1; j < diffs.size(); ++j)
      second = std::min(second, std::abs(diffs[i] - diffs[j]));

  return {min_gap, second};
}

}  // namespace mabs
