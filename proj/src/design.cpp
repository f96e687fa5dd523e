#include "mabs/design.hpp"

#include <string>

#include "mabs/errors.hpp"

namespace mabs {

std::int64_t design_row_count(int k, int m) {
  if (k < 2) throw validation_error("design: alphabet size must be >= 2");
  if (m < 1) throw validation_error("design: m must be >= 1");
  std::int64_t count = 1;
  for (int i = 0; i < m; ++i) {
    count *= k;
    if (count > kDesignRowBudget)
      throw capacity_error("design: k^m = " + std::to_string(k) + "^" +
                           std::to_string(m) + " exceeds the row budget");
  }
  return count;
}

DesignMatrix DesignMatrix::build(const Alphabet& a, int m) {
  const int k = a.k();
  const std::int64_t count = design_row_count(k, m);

  DesignMatrix d;
  d.k = k;
  d.m = m;
  d.rows.resize(count, m);

  std::vector<int> digit(m, 0);
  for (std::int64_t r = 0; r < count; ++r) {
    for (int c = 0; c < m; ++c) d.rows(r, c) = a.values[digit[c]];
    // odometer, last coordinate fastest
    for (int c = m - 1; c >= 0; --c) {
      if (++digit[c] < k) break;
      digit[c] = 0;
    }
  }
  return d;
}

Index DesignMatrix::unit_row_index(int i) const {
  if (i < 1 || i > m) throw validation_error("design: unit index out of range");
  Index idx = 1;
  for (int p = 0; p < m - i; ++p) idx *= k;
  return idx;
}

std::vector<int> DesignMatrix::digits(Index row) const {
  if (row < 0 || row >= n_rows()) throw validation_error("design: row out of range");
  std::vector<int> d(m);
  Index r = row;
  for (int c = m - 1; c >= 0; --c) {
    d[c] = static_cast<int>(r % k);
    r /= k;
  }
  return d;
}

Index DesignMatrix::index_of_digits(const std::vector<int>& d) const {
  if (static_cast<int>(d.size()) != m)
    throw validation_error("design: digit tuple has wrong arity");
  Index idx = 0;
  for (int c = 0; c < m; ++c) {
    if (d[c] < 0 || d[c] >= k) throw validation_error("design: digit out of range");
    idx = idx * k + d[c];
  }
  return idx;
}

}  // namespace mabs
