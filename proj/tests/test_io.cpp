#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "mabs/errors.hpp"
#include "mabs/instance.hpp"
#include "mabs/io.hpp"

using namespace mabs;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
  const fs::path p = fs::temp_directory_path() / "mabs_io_tests";
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("matrix csv round trips bit exactly") {
  Matrix m(2, 3);
  m << 1.0 / 3.0, std::sqrt(2.0), -0.0,
      1e-300, 12345.678901234567, 0.1;
  const fs::path p = tmp_dir() / "roundtrip.csv";
  write_matrix_csv(p.string(), m);
  const Matrix back = read_matrix_csv(p.string());
  REQUIRE(back.rows() == 2);
  REQUIRE(back.cols() == 3);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 3; ++j)
      CHECK(back(i, j) == m(i, j));
}

TEST_CASE("matrix csv skips blank lines") {
  const fs::path p = tmp_dir() / "blanks.csv";
  write_text(p, "1,2\n\n3,4\n\n");
  const Matrix m = read_matrix_csv(p.string());
  REQUIRE(m.rows() == 2);
  CHECK(m(1, 1) == 4.0);
}

TEST_CASE("matrix csv rejects malformed input") {
  CHECK_THROWS_AS(read_matrix_csv((tmp_dir() / "missing.csv").string()),
                  validation_error);

  const fs::path ragged = tmp_dir() / "ragged.csv";
  write_text(ragged, "1,2\n3\n");
  CHECK_THROWS_AS(read_matrix_csv(ragged.string()), validation_error);

  const fs::path bad = tmp_dir() / "bad.csv";
  write_text(bad, "1,two\n");
  CHECK_THROWS_AS(read_matrix_csv(bad.string()), validation_error);

  const fs::path empty = tmp_dir() / "empty.csv";
  write_text(empty, "");
  CHECK_THROWS_AS(read_matrix_csv(empty.string()), validation_error);
}

TEST_CASE("instance json round trip preserves the draw") {
  const Alphabet a = Alphabet::from_values({2.0, 4.0, 8.0});
  Matrix w(2, 2);
  w << 1.0 / 3.0, 0.25, 2.0 / 3.0, 0.75;
  const Assignment z{{0, 3, 8, 1, 4}};
  const SeparationParams p{0.05, 0.2, 0.0};
  const Instance inst = make_instance(a, w, z, 0.5, p, 99);

  const fs::path path = tmp_dir() / "inst.json";
  save_instance(path.string(), inst);
  const Instance back = load_instance(path.string());

  CHECK(back.m == 2);
  CHECK(back.M == 2);
  CHECK(back.n == 5);
  // the stored alphabet is the normalized one
  CHECK(back.alphabet.values == std::vector<double>{0.0, 1.0, 3.0});
  CHECK(back.labels == z);
  CHECK(back.sigma == 0.5);
  CHECK(back.params.delta == 0.05);
  CHECK(back.params.lambda == 0.2);
  CHECK(back.seed == 99);
  CHECK((back.omega - w).cwiseAbs().maxCoeff() == 0.0);
  // truth is recomputed, never stored
  CHECK((back.truth - inst.truth).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.observations - back.truth).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("instance json rejects schema violations") {
  CHECK_THROWS_AS(instance_from_json_text("not json"), validation_error);
  CHECK_THROWS_AS(instance_from_json_text("{}"), validation_error);

  // omega shape must match the declared m and M
  const std::string bad_shape = R"({
    "alphabet": [0, 1], "m": 2, "M": 1, "n": 1,
    "omega": [[0.3]],
    "labels": [0], "sigma": 0, "delta": 0.1, "lambda": 0.5})";
  CHECK_THROWS_AS(instance_from_json_text(bad_shape), validation_error);

  const std::string bad_labels = R"({
    "alphabet": [0, 1], "m": 2, "M": 1, "n": 3,
    "omega": [[0.3], [0.7]],
    "labels": [0], "sigma": 0, "delta": 0.1, "lambda": 0.5})";
  CHECK_THROWS_AS(instance_from_json_text(bad_labels), validation_error);

  // weight matrices inside an instance must be valid
  const std::string bad_weights = R"({
    "alphabet": [0, 1], "m": 2, "M": 1, "n": 1,
    "omega": [[0.7], [0.3]],
    "labels": [0], "sigma": 0, "delta": 0.1, "lambda": 0.5})";
  CHECK_THROWS_AS(instance_from_json_text(bad_weights), validation_error);
}

TEST_CASE("instance construction validates parameters") {
  const Alphabet a = Alphabet::from_values({0.0, 1.0});
  Matrix w(2, 1);
  w << 0.3, 0.7;
  const Assignment z{{0, 1}};
  CHECK_THROWS_AS(make_instance(a, w, z, -0.1, {0.1, 0.5, 0.0}, 0),
                  validation_error);
  CHECK_THROWS_AS(make_instance(a, w, z, 0.0, {0.0, 0.5, 0.0}, 0),
                  validation_error);
}
