#include "mabs/mixture.hpp"

#include "mabs/errors.hpp"

namespace mabs {

Matrix mixture(const Assignment& z, const Matrix& omega, const DesignMatrix& design) {
  if (design.m != omega.rows())
    throw validation_error("mixture: design arity does not match weight rows");
  const Index n = z.size();
  Matrix G(n, omega.cols());
  for (Index j = 0; j < n; ++j) {
    const std::int64_t label = z.labels[static_cast<std::size_t>(j)];
    if (label < 0 || label >= design.n_rows())
      throw validation_error("mixture: label out of design range");
    G.row(j) = design.rows.row(label) * omega;
  }
  return G;
}

double rowwise_max_distance(const Matrix& G, const Matrix& H) {
  if (G.rows() != H.rows() || G.cols() != H.cols())
    throw validation_error("rowwise distance: shape mismatch");
  double worst = 0.0;
  for (Index j = 0; j < G.rows(); ++j)
    worst = std::max(worst, (G.row(j) - H.row(j)).norm());
  return worst;
}

}  // namespace mabs
