// SPDX-License-Identifier: MIT
#include "favard/config.hpp"

#include <cmath>
#include <set>

#include "favard/errors.hpp"
#include "favard/set_models.hpp"
#include "json.hpp"

namespace favard {

namespace {

using nlohmann::json;

json to_json(const ExperimentConfig& c) {
  return json{{"rho", c.rho},
              {"n_angles", c.n_angles},
              {"pitch", c.pitch},
              {"depth_n", c.depth_n},
              {"k_max", c.k_max},
              {"kappa", c.kappa},
              {"c_eps", c.c_eps},
              {"c_lambda", c.c_lambda},
              {"big_lambda", c.big_lambda},
              {"gamma", c.gamma_value()},
              {"c_n", c.c_n},
              {"c_y", c.c_y},
              {"c_j", c.c_j},
              {"ahlfors", c.ahlfors},
              {"seed", c.seed},
              {"workers", c.workers},
              {"mc_needles", c.mc_needles},
              {"n_max", c.n_max}};
}

template <class T>
void take(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("config: bad value for ") + key + ": " + e.what());
  }
}

void check(bool ok, const char* field, const char* range) {
  if (!ok) throw PreconditionError(std::string("config: ") + field + " must satisfy " + range);
}

}  // namespace

double ExperimentConfig::gamma_value() const { return gamma > 0.0 ? gamma : std::pow(rho, -3.0); }

void ExperimentConfig::validate() const {
  const double b = 1.0 / rho;
  check(rho > 0.0 && rho <= 0.5 && std::abs(b - std::round(b)) < 1e-12, "rho", "rho = 1/b for an integer b >= 2");
  check(n_angles >= 1 && n_angles <= (1 << 24), "n_angles", "1 <= n_angles <= 2^24");
  check(pitch >= 0.0 && std::isfinite(pitch), "pitch", "pitch >= 0");
  check(depth_n >= 0 && depth_n <= 12, "depth_n", "0 <= depth_n <= 12");
  check(k_max >= 0 && k_max <= 12, "k_max", "0 <= k_max <= 12");
  check(kappa > 0.0 && kappa <= 1.0, "kappa", "0 < kappa <= 1");
  check(c_eps > 0.0 && c_eps < 1.0, "c_eps", "0 < c_eps < 1");
  check(c_lambda > 0.0 && c_lambda < 1.0, "c_lambda", "0 < c_lambda < 1");
  check(big_lambda > 1.0 / rho, "big_lambda", "big_lambda > 1/rho");
  check(gamma >= 0.0, "gamma", "gamma >= 0");
  check(c_n >= 1.0, "c_n", "c_n >= 1");
  check(c_y > 0.0 && c_y < 1.0, "c_y", "0 < c_y < 1");
  check(c_j > 0.0 && c_j < 1.0, "c_j", "0 < c_j < 1");
  check(ahlfors >= 1.0, "ahlfors", "ahlfors >= 1");
  check(workers >= 1 && workers <= 1024, "workers", "1 <= workers <= 1024");
  check(mc_needles <= (std::uint64_t{1} << 34), "mc_needles", "mc_needles <= 2^34");
  check(n_max >= 0 && n_max <= 6, "n_max", "0 <= n_max <= 6");
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw IoError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw PreconditionError("config: top level must be an object");
  ExperimentConfig c;
  const auto known = to_json(c);
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw PreconditionError("config: unknown key " + key);
  }
  take(j, "rho", c.rho);
  take(j, "n_angles", c.n_angles);
  take(j, "pitch", c.pitch);
  take(j, "depth_n", c.depth_n);
  take(j, "k_max", c.k_max);
  take(j, "kappa", c.kappa);
  take(j, "c_eps", c.c_eps);
  take(j, "c_lambda", c.c_lambda);
  take(j, "big_lambda", c.big_lambda);
  take(j, "gamma", c.gamma);
  take(j, "c_n", c.c_n);
  take(j, "c_y", c.c_y);
  take(j, "c_j", c.c_j);
  take(j, "ahlfors", c.ahlfors);
  take(j, "seed", c.seed);
  take(j, "workers", c.workers);
  take(j, "mc_needles", c.mc_needles);
  take(j, "n_max", c.n_max);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

std::string config_to_json(const ExperimentConfig& c) { return to_json(c).dump(2); }

}  // namespace favard
