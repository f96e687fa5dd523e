#pragma once

#include <cstdint>
#include <string>

#include "mabs/alphabet.hpp"
#include "mabs/assignment.hpp"
#include "mabs/separation.hpp"
#include "mabs/types.hpp"

namespace mabs {

// A fully specified problem draw. truth is always the exact mixture of
// (labels, omega); observations equal truth when sigma == 0.
struct Instance {
  Alphabet alphabet;
  int m = 0;
  Index M = 0;
  Index n = 0;
  Matrix omega;
  Assignment labels;
  double sigma = 0.0;
  SeparationParams params;  // delta, lambda; epsilon unused here
  std::uint64_t seed = 0;
  Matrix truth;
  Matrix observations;
};

// Validates shapes, recomputes truth, sets observations = truth.
Instance make_instance(const Alphabet& a, const Matrix& omega, const Assignment& z,
                       double sigma, const SeparationParams& p, std::uint64_t seed);

// Instance files carry the generating parameters, not realized noise:
// keys alphabet, m, M, n, omega, labels, sigma, delta, lambda, seed.
std::string instance_to_json(const Instance& inst);
Instance instance_from_json_text(const std::string& text);
Instance load_instance(const std::string& path);
void save_instance(const std::string& path, const Instance& inst);

}  // namespace mabs
