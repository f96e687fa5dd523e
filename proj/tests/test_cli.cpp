#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "doctest.h"
#include "mabs/constructions.hpp"
#include "mabs/estimation.hpp"
#include "mabs/instance.hpp"
#include "mabs/io.hpp"
#include "mabs/mixture.hpp"
#include "mabs/separation.hpp"

using namespace mabs;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

const fs::path& scratch() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() /
                 ("mabs_cli_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

CliRun cli(const std::string& args) {
  const fs::path out = scratch() / "stdout.txt";
  const fs::path err = scratch() / "stderr.txt";
  const std::string cmd = std::string(MABS_CLI_PATH) + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

// emit_error writes a human line then a json line; take the json
json last_json_line(const std::string& text) {
  std::istringstream lines(text);
  std::string line, last;
  while (std::getline(lines, line))
    if (!line.empty()) last = line;
  return json::parse(last);
}

Alphabet binary() { return Alphabet::from_values({0.0, 1.0}); }

}  // namespace

TEST_CASE("version and argument errors") {
  const CliRun v = cli("--version");
  CHECK(v.code == 0);
  CHECK(v.out.find("mabs 1.0.0") != std::string::npos);

  CHECK(cli("estimate").code == 2);          // missing required flags
  CHECK(cli("no-such-command").code == 2);
}

TEST_CASE("construct writes the quadratic witness and its diagnostics") {
  const std::string delta_text = "0.14142135623730951";
  const double delta = std::stod(delta_text);
  const fs::path out = scratch() / "witness.csv";

  const CliRun r = cli("construct --fixture quadratic --alphabet 0,1 --m 2 "
                       "--delta " + delta_text + " --out " + out.string());
  REQUIRE(r.code == 0);

  const Matrix w = read_matrix_csv(out.string());
  const Matrix expected = omega_star_quadratic(binary(), 2, delta);
  CHECK((w - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK(w(0, 0) == doctest::Approx(13.0 / 15.0).epsilon(1e-12));
  CHECK(w(1, 0) == doctest::Approx(2.0 / 15.0).epsilon(1e-12));

  const json meta = json::parse(slurp(out.string() + ".json"));
  CHECK(meta.at("fixture") == "quadratic");
  CHECK(meta.at("M") == 2);
  CHECK(meta.at("asb").get<double>() ==
        doctest::Approx(13.0 / (15.0 * std::sqrt(2.0))).epsilon(1e-12));
}

TEST_CASE("check reports the library diagnostics for an instance file") {
  const Matrix omega = omega_star_quadratic(binary(), 2, 0.1);
  Assignment z;
  z.labels = {0, 1, 2, 3, 1, 2};
  SeparationParams p{0.1, 0.25, 0.0};
  const Instance inst = make_instance(binary(), omega, z, 0.0, p, 7);
  const fs::path path = scratch() / "inst.json";
  save_instance(path.string(), inst);

  const CliRun r = cli("check --input " + path.string());
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  const SeparationDiagnostics d = is_delta_separable(omega, z, binary(), p);
  CHECK(j.at("asb").get<double>() == d.asb);
  CHECK(j.at("wsb").get<double>() == d.wsb);
  CHECK(j.at("pass") == d.pass);
  CHECK(j.at("required") == d.required);
  CHECK(j.at("unit_counts").get<std::vector<Index>>() == d.unit_counts);
}

TEST_CASE("estimate matches the in-process oracle and reports ties") {
  // two observations engineered so two labelings tie exactly
  const fs::path path = scratch() / "tie.csv";
  Matrix Y(2, 1);
  Y << -1.0 / 3.0, 0.0;
  write_matrix_csv(path.string(), Y);

  const CliRun r = cli("estimate --input " + path.string() +
                       " --alphabet 0,1,2 --m 2 --method exact-enum "
                       "--delta 0.1 --lambda 1.0");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);

  SeparationParams p{0.1, 1.0, 0.0};
  const EstimationResult oracle =
      exact_lse_enumerate(Y, Alphabet::from_values({0, 1, 2}), 2, p);
  CHECK(j.at("objective").get<double>() == oracle.objective);
  CHECK(j.at("labels").get<std::vector<Index>>() == oracle.labels.labels);
  CHECK(j.at("ties").size() == 2);
  CHECK(j.at("feasible") == true);
}

TEST_CASE("recover certifies a noiseless instance") {
  const Matrix omega = omega_star_quadratic(binary(), 2, 0.1);
  const double sep = std::min(asb(omega, binary()), wsb(omega, binary()));
  Assignment z;
  z.labels = {0, 1, 2, 3, 2, 1, 0, 3};
  const Matrix Y = mixture(z, omega, DesignMatrix::build(binary(), 2));
  const fs::path path = scratch() / "clean.csv";
  write_matrix_csv(path.string(), Y);

  std::ostringstream cmd;
  cmd << "recover --input " << path.string() << " --alphabet 0,1 --m 2"
      << " --delta " << 0.9 * sep << " --lambda 0.25 --epsilon 1e-6";
  const CliRun r = cli(cmd.str());
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("certified") == true);
  CHECK(j.at("labels").get<std::vector<Index>>() == z.labels);
  CHECK(j.at("residual").get<double>() <= 1e-12);
}

TEST_CASE("rates runs a sweep from a config file deterministically") {
  const fs::path cfg_path = scratch() / "sweep.json";
  const fs::path csv_a = scratch() / "sweep_a.csv";
  const fs::path csv_b = scratch() / "sweep_b.csv";
  {
    json cfg{{"alphabet", {0.0, 1.0}},
             {"m", 2},
             {"n_values", {8}},
             {"M_values", {1}},
             {"sigma_values", {0.05}},
             {"replicates", 3},
             {"delta", 0.1},
             {"lambda", 1.0},
             {"estimator", "exact-enum"},
             {"seed", 777},
             {"out", csv_a.string()}};
    std::ofstream out(cfg_path);
    out << cfg.dump();
  }

  const CliRun a = cli("rates --config " + cfg_path.string());
  REQUIRE(a.code == 0);
  const json ja = json::parse(a.out);
  REQUIRE(ja.at("records").size() == 1);
  CHECK(ja.at("records")[0].at("count") == 3);
  CHECK(std::isfinite(ja.at("records")[0].at("mean_pred").get<double>()));

  const std::string text = slurp(csv_a);
  std::istringstream lines(text);
  std::string header;
  std::getline(lines, header);
  CHECK(header ==
        "n,M,sigma,delta,lambda,estimator,replicate,pred_err,class_err,"
        "est_err,feasible,seed");
  int body = 0;
  for (std::string line; std::getline(lines, line);) ++body;
  CHECK(body == 3);

  const CliRun b = cli("rates --config " + cfg_path.string() + " --out " +
                       csv_b.string());
  REQUIRE(b.code == 0);
  CHECK(slurp(csv_b) == text);

  const CliRun c = cli("rates --config " + cfg_path.string() + " --seed 778 "
                       "--out " + csv_b.string());
  REQUIRE(c.code == 0);
  CHECK(slurp(csv_b) != text);
}

TEST_CASE("failure kinds map to distinct exit codes") {
  const fs::path small = scratch() / "small.csv";
  Matrix Y(2, 1);
  Y << 0.2, 0.8;
  write_matrix_csv(small.string(), Y);

  // unknown estimator name is a validation failure
  const CliRun v = cli("estimate --input " + small.string() +
                       " --alphabet 0,1 --m 2 --method newton "
                       "--delta 0.1 --lambda 1.0");
  CHECK(v.code == 2);
  CHECK(last_json_line(v.err).at("error") == "validation");

  // missing input file as well
  CHECK(cli("estimate --input " + (scratch() / "absent.csv").string() +
            " --alphabet 0,1 --m 2 --delta 0.1 --lambda 1.0")
            .code == 2);

  // exhaustive enumeration over too many rows is a capacity failure
  const fs::path wide = scratch() / "wide.csv";
  write_matrix_csv(wide.string(), Matrix::Random(20, 1));
  const CliRun cap = cli("estimate --input " + wide.string() +
                         " --alphabet 0,1 --m 2 --method exact-enum "
                         "--delta 0.1 --lambda 1.0");
  CHECK(cap.code == 3);
  CHECK(last_json_line(cap.err).at("error") == "capacity");

  // noiseless data whose labeling starves a unit: recovery failure
  Matrix w(2, 2);
  w << 0.3, 0.1, 0.7, 0.9;
  Assignment z;
  z.labels = {2, 1, 0, 3};
  const Matrix Yv = mixture(z, w, DesignMatrix::build(binary(), 2));
  const fs::path starved = scratch() / "starved.csv";
  write_matrix_csv(starved.string(), Yv);
  const double sep = std::min(asb(w, binary()), wsb(w, binary()));
  std::ostringstream cmd;
  cmd << "recover --input " << starved.string() << " --alphabet 0,1 --m 2"
      << " --delta " << 0.9 * sep << " --lambda 1.0 --epsilon 1e-9";
  const CliRun rec = cli(cmd.str());
  CHECK(rec.code == 4);
  const json rj = last_json_line(rec.err);
  CHECK(rj.at("error") == "recovery");
  CHECK(rj.at("best_residual").get<double>() <= 1e-12);

  // a separation level no weight matrix attains: estimation failure
  const CliRun est = cli("estimate --input " + small.string() +
                         " --alphabet 0,1 --m 2 --method exact-enum "
                         "--delta 0.6 --lambda 1.0");
  CHECK(est.code == 4);
  CHECK(last_json_line(est.err).at("error") == "estimation");
}
