#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "experiment.hpp"
#include "types.hpp"

namespace sparsemnl {

/// Apply a JSON object onto a config. Unknown keys are an error so a
/// typo cannot silently fall back to a default. Keys mirror the struct
/// fields; method/lambda/generator take the same tokens as the CLI.
inline void apply_config_json(const nlohmann::json& j, ScenarioConfig& cfg) {
  if (!j.is_object()) throw ConfigError("config JSON must be an object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "d")
        cfg.d = value.get<int>();
      else if (key == "d0")
        cfg.d0 = value.get<int>();
      else if (key == "L")
        cfg.L = value.get<int>();
      else if (key == "n")
        cfg.n = value.get<long>();
      else if (key == "delta")
        cfg.delta = value.get<double>();
      else if (key == "generator")
        cfg.generator = generator_from_string(value.get<std::string>());
      else if (key == "b_scale")
        cfg.b_scale = value.get<double>();
      else if (key == "seed")
        cfg.seed = value.get<std::uint64_t>();
      else if (key == "method")
        cfg.method = fit_method_from_string(value.get<std::string>());
      else if (key == "lambda")
        cfg.lambda_kind = lambda_kind_from_string(value.get<std::string>());
      else if (key == "c0_tune")
        cfg.c0_tune = value.get<double>();
      else if (key == "c1")
        cfg.c1 = value.get<double>();
      else if (key == "c2")
        cfg.c2 = value.get<double>();
      else if (key == "n_mc")
        cfg.n_mc = value.get<long>();
      else if (key == "max_size")
        cfg.max_size = value.get<int>();
      else if (key == "tol")
        cfg.tol = value.get<double>();
      else if (key == "max_iter")
        cfg.max_iter = value.get<long>();
      else
        throw ConfigError("unknown config key: " + key);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("bad value for config key '" + key +
                        "': " + e.what());
    }
  }
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse config " + path + ": " + e.what());
  }
  ScenarioConfig cfg;
  apply_config_json(j, cfg);
  return cfg;
}

inline nlohmann::json config_to_json(const ScenarioConfig& cfg) {
  nlohmann::json j;
  j["d"] = cfg.d;
  j["d0"] = cfg.d0;
  j["L"] = cfg.L;
  j["n"] = cfg.n;
  j["delta"] = cfg.delta;
  j["generator"] = to_string(cfg.generator);
  j["b_scale"] = cfg.b_scale;
  j["seed"] = cfg.seed;
  j["method"] = to_string(cfg.method);
  j["lambda"] = to_string(cfg.lambda_kind);
  j["c0_tune"] = cfg.c0_tune;
  j["c1"] = cfg.c1;
  j["c2"] = cfg.c2;
  j["n_mc"] = cfg.n_mc;
  j["max_size"] = cfg.max_size;
  j["tol"] = cfg.tol;
  j["max_iter"] = cfg.max_iter;
  return j;
}

}  // namespace sparsemnl
