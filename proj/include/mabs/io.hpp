#pragma once

#include <string>

#include "mabs/types.hpp"

namespace mabs {

// Matrix files: comma-separated numeric cells, no header, one matrix row per
// line. Values are written with 17 significant digits, so write/read
// round-trips bit-exactly.
Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& m);

std::string format_double(double v);

}  // namespace mabs
