#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mabs/alphabet.hpp"
#include "mabs/constructions.hpp"
#include "mabs/errors.hpp"
#include "mabs/estimation.hpp"
#include "mabs/instance.hpp"
#include "mabs/io.hpp"
#include "mabs/recovery.hpp"
#include "mabs/separation.hpp"
#include "mabs/simulation.hpp"

namespace {

using nlohmann::json;

constexpr const char* kVersion = "1.0.0";

// Inline "0,1,2" or a path to a file of numbers.
mabs::Alphabet parse_alphabet(const std::string& text) {
  std::vector<double> values;
  std::string data = text;
  if (std::filesystem::exists(text)) {
    std::ifstream in(text);
    std::stringstream buffer;
    buffer << in.rdbuf();
    data = buffer.str();
  }
  std::string token;
  std::stringstream stream(data);
  while (std::getline(stream, token, ',')) {
    std::stringstream cell(token);
    double v;
    if (cell >> v) values.push_back(v);
    else if (!token.empty() && token.find_first_not_of(" \t\r\n") != std::string::npos)
      throw mabs::validation_error("alphabet: cannot parse '" + token + "'");
  }
  return mabs::Alphabet::from_values(values);
}

json matrix_to_json(const mabs::Matrix& m) {
  json rows = json::array();
  for (mabs::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (mabs::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    rows.push_back(row);
  }
  return rows;
}

void emit(const json& j, const std::string& out_path) {
  const std::string text = j.dump(2);
  std::cout << text << '\n';
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw mabs::validation_error("cannot write " + out_path);
    out << text << '\n';
  }
}

void emit_error(const std::string& kind, const std::string& message) {
  std::cerr << "error: " << message << '\n';
  json j{{"error", kind}, {"message", message}};
  std::cerr << j.dump() << '\n';
}

struct CheckOptions {
  std::string input;
};

void run_check(const CheckOptions& opt) {
  const mabs::Instance inst = mabs::load_instance(opt.input);
  const mabs::SeparationDiagnostics d =
      mabs::is_delta_separable(inst.omega, inst.labels, inst.alphabet, inst.params);
  json j{{"asb", d.asb},
         {"wsb", std::isfinite(d.wsb) ? json(d.wsb) : json("inf")},
         {"unit_counts", d.unit_counts},
         {"required", d.required},
         {"pass_ic1", d.pass_ic1},
         {"pass_ic2", d.pass_ic2},
         {"pass", d.pass}};
  emit(j, "");
}

struct ConstructOptions {
  std::string fixture;
  std::string alphabet;
  int m = 2;
  std::int64_t M = 0;  // 0: use m
  double delta = 0.1;
  double target = 0.0;
  double scale = 0.5;
  std::string out;
};

void run_construct(const ConstructOptions& opt) {
  const mabs::Alphabet a = parse_alphabet(opt.alphabet);
  const mabs::Index M = opt.M > 0 ? opt.M : opt.m;

  mabs::Matrix omega;
  json extra = json::object();
  double delta_target = opt.delta;
  if (opt.fixture == "quadratic") {
    omega = mabs::omega_star_quadratic(a, opt.m, opt.delta);
  } else if (opt.fixture == "extend") {
    omega = mabs::omega_extend(mabs::omega_star_quadratic(a, opt.m, opt.delta), M);
  } else if (opt.fixture == "calibrate") {
    if (!(opt.target > 0.0))
      throw mabs::validation_error("construct: calibrate needs --target > 0");
    const mabs::Calibration cal =
        mabs::calibrate_asb(mabs::omega_star_quadratic(a, opt.m, opt.delta), a, opt.target);
    omega = cal.omega;
    delta_target = opt.target;
    extra["epsilon"] = cal.epsilon;
    extra["achieved"] = cal.achieved;
    extra["iterations"] = cal.iterations;
  } else if (opt.fixture == "hyperrect") {
    mabs::Matrix center = mabs::omega_star_quadratic(a, opt.m, opt.delta);
    if (M != opt.m) center = mabs::omega_extend(center, M);
    const double limit = mabs::hyperrectangle_limit(a, opt.m);
    const mabs::Matrix eps =
        mabs::Matrix::Constant(opt.m - 1, M, opt.scale * limit);
    omega = mabs::hyperrectangle_perturbation(center, eps);
    extra["entry_limit"] = limit;
    extra["scale"] = opt.scale;
  } else {
    throw mabs::validation_error(
        "construct: fixture must be quadratic, extend, calibrate, or hyperrect");
  }

  mabs::write_matrix_csv(opt.out, omega);
  json meta{{"fixture", opt.fixture},
            {"alphabet", a.values},
            {"m", opt.m},
            {"M", omega.cols()},
            {"delta_target", delta_target},
            {"asb", mabs::asb(omega, a)},
            {"wsb", omega.rows() == 1 ? json("inf") : json(mabs::wsb(omega, a))}};
  for (auto& [key, value] : extra.items()) meta[key] = value;
  std::ofstream side(opt.out + ".json");
  if (!side) throw mabs::validation_error("cannot write " + opt.out + ".json");
  side << meta.dump(2) << '\n';
  std::cout << meta.dump(2) << '\n';
}

struct RecoverOptions {
  std::string input;
  std::string alphabet;
  int m = 2;
  double delta = 0.0;
  double lambda = 0.0;
  double epsilon = 0.0;
  std::string out;
};

void run_recover(const RecoverOptions& opt) {
  const mabs::Matrix Y = mabs::read_matrix_csv(opt.input);
  const mabs::Alphabet a = parse_alphabet(opt.alphabet);
  mabs::SeparationParams p;
  p.delta = opt.delta;
  p.lambda = opt.lambda;
  p.epsilon = opt.epsilon;
  const mabs::RecoveryResult r = mabs::recover(Y, a, opt.m, p);
  json j{{"certified", r.certified},
         {"labels", r.labels.labels},
         {"omega", matrix_to_json(r.omega)},
         {"residual", r.residual}};
  emit(j, opt.out);
}

struct EstimateOptions {
  std::string input;
  std::string alphabet;
  std::string method = "lloyd";
  int m = 2;
  double delta = 0.0;
  double lambda = 0.0;
  double epsilon = 0.0;
  int restarts = 10;
  std::uint64_t seed = 0;
  double grid_step = 1e-3;
  std::string out;
};

void run_estimate(const EstimateOptions& opt) {
  const mabs::Matrix Y = mabs::read_matrix_csv(opt.input);
  const mabs::Alphabet a = parse_alphabet(opt.alphabet);
  mabs::SeparationParams p;
  p.delta = opt.delta;
  p.lambda = opt.lambda;
  p.epsilon = opt.epsilon;

  mabs::EstimationResult est;
  if (opt.method == "lloyd")
    est = mabs::lloyd_lse(Y, a, opt.m, p, opt.restarts, opt.seed);
  else if (opt.method == "exact-enum")
    est = mabs::exact_lse_enumerate(Y, a, opt.m, p);
  else if (opt.method == "exact-grid")
    est = mabs::exact_lse_grid(Y, a, opt.m, p, opt.grid_step);
  else
    throw mabs::validation_error(
        "estimate: method must be lloyd, exact-enum, or exact-grid");

  json ties = json::array();
  for (const auto& tie : est.ties)
    ties.push_back({{"labels", tie.labels.labels},
                    {"omega", matrix_to_json(tie.omega)},
                    {"objective", tie.objective}});
  json j{{"method", opt.method},
         {"labels", est.labels.labels},
         {"omega", matrix_to_json(est.omega)},
         {"objective", est.objective},
         {"feasible", est.feasible},
         {"iterations", est.iterations},
         {"restarts_used", est.restarts_used},
         {"ties", ties}};
  emit(j, opt.out);
}

struct RatesOptions {
  std::string config;
  std::string estimator;
  int replicates = 0;
  int restarts = 0;
  double delta = -1.0;
  double lambda = -1.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
};

void run_rates(const RatesOptions& opt) {
  std::ifstream in(opt.config);
  if (!in) throw mabs::validation_error("rates: cannot open " + opt.config);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw mabs::validation_error(std::string("rates: invalid config json: ") + e.what());
  }

  mabs::SweepConfig config;
  try {
    config.alphabet =
        mabs::Alphabet::from_values(j.at("alphabet").get<std::vector<double>>());
    config.m = j.at("m").get<int>();
    config.n_values = j.at("n_values").get<std::vector<mabs::Index>>();
    config.M_values = j.at("M_values").get<std::vector<mabs::Index>>();
    config.sigma_values = j.at("sigma_values").get<std::vector<double>>();
    config.replicates = j.value("replicates", 10);
    config.delta = j.value("delta", 0.0);
    config.lambda = j.value("lambda", 0.0);
    config.estimator = j.value("estimator", std::string("lloyd"));
    config.restarts = j.value("restarts", 10);
    config.seed = j.value("seed", std::uint64_t{0});
  } catch (const json::exception& e) {
    throw mabs::validation_error(std::string("rates: config schema: ") + e.what());
  }
  std::string out_path = j.value("out", std::string{});

  if (!opt.estimator.empty()) config.estimator = opt.estimator;
  if (opt.replicates > 0) config.replicates = opt.replicates;
  if (opt.restarts > 0) config.restarts = opt.restarts;
  if (opt.delta >= 0.0) config.delta = opt.delta;
  if (opt.lambda >= 0.0) config.lambda = opt.lambda;
  if (opt.seed_set) config.seed = opt.seed;
  if (!opt.out.empty()) out_path = opt.out;
  if (out_path.empty()) throw mabs::validation_error("rates: no output path given");

  const mabs::SweepResult result = mabs::run_sweep(config);
  mabs::write_sweep_csv(out_path, result);

  json records = json::array();
  for (const auto& r : result.records)
    records.push_back({{"n", r.n},
                       {"M", r.M},
                       {"sigma", r.sigma},
                       {"delta", r.delta},
                       {"lambda", r.lambda},
                       {"count", r.count},
                       {"mean_pred", r.mean_pred},
                       {"se_pred", r.se_pred},
                       {"mean_class", r.mean_class},
                       {"se_class", r.se_class},
                       {"mean_est", r.mean_est},
                       {"se_est", r.se_est}});
  std::cout << json{{"out", out_path}, {"records", records}}.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite alphabet blind separation toolkit"};
  app.set_version_flag("--version", std::string("mabs ") + kVersion);
  app.require_subcommand(1);

  CheckOptions check_opt;
  auto* check = app.add_subcommand("check", "separation diagnostics of an instance file");
  check->add_option("--input", check_opt.input, "instance json")->required();
  check->callback([&] { run_check(check_opt); });

  ConstructOptions con_opt;
  auto* con = app.add_subcommand("construct", "write a witness weight matrix");
  con->add_option("--fixture", con_opt.fixture,
                  "quadratic | extend | calibrate | hyperrect")
      ->required();
  con->add_option("--alphabet", con_opt.alphabet, "inline values or file")->required();
  con->add_option("--m", con_opt.m, "number of sources")->required();
  con->add_option("--M", con_opt.M, "number of columns (default m)");
  con->add_option("--delta", con_opt.delta, "separation level of the base witness");
  con->add_option("--target", con_opt.target, "calibrate: alphabet boundary target");
  con->add_option("--scale", con_opt.scale, "hyperrect: fraction of the entry limit");
  con->add_option("--out", con_opt.out, "weights csv path")->required();
  con->callback([&] { run_construct(con_opt); });

  RecoverOptions rec_opt;
  auto* rec = app.add_subcommand("recover", "exact recovery from perturbed rows");
  rec->add_option("--input", rec_opt.input, "observations csv")->required();
  rec->add_option("--alphabet", rec_opt.alphabet, "inline values or file")->required();
  rec->add_option("--m", rec_opt.m, "number of sources")->required();
  rec->add_option("--delta", rec_opt.delta, "separation level")->required();
  rec->add_option("--lambda", rec_opt.lambda, "occupancy level")->required();
  rec->add_option("--epsilon", rec_opt.epsilon, "rowwise perturbation bound")->required();
  rec->add_option("--out", rec_opt.out, "also write the result json here");
  rec->callback([&] { run_recover(rec_opt); });

  EstimateOptions est_opt;
  auto* est = app.add_subcommand("estimate", "least squares estimation");
  est->add_option("--input", est_opt.input, "observations csv")->required();
  est->add_option("--alphabet", est_opt.alphabet, "inline values or file")->required();
  est->add_option("--method", est_opt.method, "lloyd | exact-enum | exact-grid");
  est->add_option("--m", est_opt.m, "number of sources")->required();
  est->add_option("--delta", est_opt.delta, "separation level")->required();
  est->add_option("--lambda", est_opt.lambda, "occupancy level")->required();
  est->add_option("--epsilon", est_opt.epsilon, "recovery seeding bound (lloyd)");
  est->add_option("--restarts", est_opt.restarts, "lloyd restarts");
  est->add_option("--seed", est_opt.seed, "lloyd restart seed");
  est->add_option("--grid-step", est_opt.grid_step, "exact-grid resolution");
  est->add_option("--out", est_opt.out, "also write the result json here");
  est->callback([&] { run_estimate(est_opt); });

  RatesOptions rat_opt;
  auto* rat = app.add_subcommand("rates", "monte carlo error-rate sweep");
  rat->add_option("--config", rat_opt.config, "sweep config json")->required();
  rat->add_option("--estimator", rat_opt.estimator, "override: estimator");
  rat->add_option("--replicates", rat_opt.replicates, "override: replicates");
  rat->add_option("--restarts", rat_opt.restarts, "override: lloyd restarts");
  rat->add_option("--delta", rat_opt.delta, "override: separation level");
  rat->add_option("--lambda", rat_opt.lambda, "override: occupancy level");
  auto* seed_opt = rat->add_option("--seed", rat_opt.seed, "override: master seed");
  rat->add_option("--out", rat_opt.out, "override: csv output path");
  rat->callback([&] {
    rat_opt.seed_set = seed_opt->count() > 0;
    run_rates(rat_opt);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const mabs::validation_error& e) {
    emit_error("validation", e.what());
    return 2;
  } catch (const mabs::capacity_error& e) {
    emit_error("capacity", e.what());
    return 3;
  } catch (const mabs::recovery_failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    json j{{"error", "recovery"}, {"message", e.what()}, {"best_residual", e.best_residual}};
    std::cerr << j.dump() << '\n';
    return 4;
  } catch (const mabs::estimation_failure& e) {
    emit_error("estimation", e.what());
    return 4;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return 1;
  }
  return 0;
}
