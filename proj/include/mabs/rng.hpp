#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mabs {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Substream seed from (master, part, part, ...). Every replicate owns a seed
// derived this way, so results never depend on thread scheduling.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> parts) {
  std::uint64_t s = splitmix64(master);
  for (auto p : parts) s = splitmix64(s ^ (p + 0x9e3779b97f4a7c15ULL));
  return s;
}

// Deterministic random stream. Distribution objects are constructed per call;
// the variate count consumed per draw is then fixed, so a stream's output is a
// pure function of its seed.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : gen_(seed) {}

  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(gen_);
  }
  double normal() {
    return std::normal_distribution<double>(0.0, 1.0)(gen_);
  }
  // Uniform integer in [0, bound).
  std::uint64_t integer(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(gen_);
  }
  std::mt19937_64& raw() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace mabs
