#include "mabs/instance.hpp"

#include <fstream>

#include <json.hpp>

#include "mabs/errors.hpp"
#include "mabs/mixture.hpp"
#include "mabs/weights.hpp"

namespace mabs {

using nlohmann::json;

Instance make_instance(const Alphabet& a, const Matrix& omega, const Assignment& z,
                       double sigma, const SeparationParams& p, std::uint64_t seed) {
  if (sigma < 0.0) throw validation_error("instance: sigma must be >= 0");
  validate_params(p);
  require_valid_weights(omega);

  Instance inst;
  inst.alphabet = a;
  inst.m = static_cast<int>(omega.rows());
  inst.M = omega.cols();
  inst.n = z.size();
  inst.omega = omega;
  inst.labels = z;
  inst.sigma = sigma;
  inst.params = p;
  inst.seed = seed;

  const DesignMatrix design = DesignMatrix::build(a, inst.m);
  inst.truth = mixture(z, omega, design);
  inst.observations = inst.truth;
  return inst;
}

std::string instance_to_json(const Instance& inst) {
  json j;
  j["alphabet"] = inst.alphabet.values;
  j["m"] = inst.m;
  j["M"] = inst.M;
  j["n"] = inst.n;
  std::vector<std::vector<double>> omega(static_cast<std::size_t>(inst.m));
  for (Index i = 0; i < inst.omega.rows(); ++i) {
    auto& row = omega[static_cast<std::size_t>(i)];
    row.resize(static_cast<std::size_t>(inst.M));
    for (Index c = 0; c < inst.M; ++c) row[static_cast<std::size_t>(c)] = inst.omega(i, c);
  }
  j["omega"] = omega;
  j["labels"] = inst.labels.labels;
  j["sigma"] = inst.sigma;
  j["delta"] = inst.params.delta;
  j["lambda"] = inst.params.lambda;
  j["seed"] = inst.seed;
  return j.dump(2);
}

Instance instance_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw validation_error(std::string("instance: invalid json: ") + e.what());
  }

  try {
    const Alphabet a = Alphabet::from_values(j.at("alphabet").get<std::vector<double>>());
    const int m = j.at("m").get<int>();
    const Index M = j.at("M").get<Index>();
    const Index n = j.at("n").get<Index>();

    const auto omega_rows = j.at("omega").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(omega_rows.size()) != m)
      throw validation_error("instance: omega row count does not match m");
    Matrix omega(m, M);
    for (int i = 0; i < m; ++i) {
      if (static_cast<Index>(omega_rows[static_cast<std::size_t>(i)].size()) != M)
        throw validation_error("instance: omega column count does not match M");
      for (Index c = 0; c < M; ++c)
        omega(i, c) = omega_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
    }

    Assignment z;
    z.labels = j.at("labels").get<std::vector<std::int64_t>>();
    if (static_cast<Index>(z.labels.size()) != n)
      throw validation_error("instance: label count does not match n");

    SeparationParams p;
    p.delta = j.at("delta").get<double>();
    p.lambda = j.at("lambda").get<double>();

    const double sigma = j.at("sigma").get<double>();
    const std::uint64_t seed = j.value("seed", std::uint64_t{0});

    return make_instance(a, omega, z, sigma, p, seed);
  } catch (const json::exception& e) {
    throw validation_error(std::string("instance: schema mismatch: ") + e.what());
  }
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("instance: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return instance_from_json_text(text);
}

void save_instance(const std::string& path, const Instance& inst) {
  std::ofstream out(path);
  if (!out) throw validation_error("instance: cannot write " + path);
  out << instance_to_json(inst) << '\n';
}

}  // namespace mabs
