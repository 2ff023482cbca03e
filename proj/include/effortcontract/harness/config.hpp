#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "effortcontract/errors.hpp"
#include "effortcontract/function_family.hpp"
#include "effortcontract/game_model.hpp"
#include "effortcontract/simulation.hpp"

namespace effortcontract::harness {

/// Malformed or schema-violating experiment config (CLI exit code 2).
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct GameConfig
{
  std::size_t                n = 0;
  std::vector<SensorProfile> sensors;
  bool                       per_sensor = false;  // any of alpha/cost/noise given as an array
};

struct ContractConfig
{
  std::vector<double>                gamma;  // one per sensor
  std::vector<std::optional<double>> delta;  // nullopt means "ir_floor"
};

struct SweepConfig
{
  double                   gamma_min   = 0.0;
  double                   gamma_max   = 0.0;
  std::size_t              gamma_steps = 0;
  std::vector<std::size_t> n_list;
  bool                     log_spacing = true;

  std::vector<double> gammas() const;
};

struct DesignConfig
{
  std::optional<double> epsilon;
  std::optional<double> beta;
};

struct ScanConfig
{
  std::size_t   sensor        = 0;
  double        grid_min      = 0.0;
  double        grid_max      = 0.0;
  double        grid_step     = 0.0;
  std::uint64_t perturbations = 0;

  std::vector<double> grid() const
  {
    std::vector<double> out;
    auto const          count = static_cast<std::size_t>((grid_max - grid_min) / grid_step + 1e-9) + 1;
    for (std::size_t k = 0; k < count; ++k)
    {
      out.push_back(grid_min + grid_step * static_cast<double>(k));
    }
    return out;
  }
};

struct SimulateConfig
{
  SimConfig                 sim;
  std::optional<ScanConfig> scan;
};

struct ExperimentConfig
{
  GameConfig                    game;
  std::optional<ContractConfig> contract;
  std::optional<SweepConfig>    sweep;
  std::optional<DesignConfig>   design;
  std::optional<SimulateConfig> simulate;
  std::optional<std::string>    output;
};

inline std::vector<double> SweepConfig::gammas() const
{
  std::vector<double> out;
  if (gamma_steps == 1)
  {
    out.push_back(gamma_min);
    return out;
  }
  for (std::size_t k = 0; k < gamma_steps; ++k)
  {
    double const t = static_cast<double>(k) / static_cast<double>(gamma_steps - 1);
    out.push_back(log_spacing ? gamma_min * std::pow(gamma_max / gamma_min, t)
                              : gamma_min + (gamma_max - gamma_min) * t);
  }
  out.back() = gamma_max;
  return out;
}

namespace detail {

using nlohmann::json;

inline void require_object(const json& j, const std::string& where,
                           std::initializer_list<const char*> allowed)
{
  if (!j.is_object())
  {
    throw ConfigError(where + ": expected an object");
  }
  for (auto const& [key, value] : j.items())
  {
    bool known = false;
    for (const char* a : allowed)
    {
      known = known || key == a;
    }
    if (!known)
    {
      throw ConfigError(where + ": unknown key \"" + key + "\"");
    }
  }
}

inline const json& member(const json& j, const std::string& where, const char* key)
{
  if (!j.contains(key))
  {
    throw ConfigError(where + ": missing key \"" + key + "\"");
  }
  return j.at(key);
}

inline double number(const json& j, const std::string& where)
{
  if (!j.is_number())
  {
    throw ConfigError(where + ": expected a number");
  }
  double const v = j.get<double>();
  if (!std::isfinite(v))
  {
    throw ConfigError(where + ": expected a finite number");
  }
  return v;
}

inline double number(const json& j, const std::string& where, const char* key)
{
  return number(member(j, where, key), where + "." + key);
}

inline std::uint64_t count(const json& j, const std::string& where)
{
  bool const ok = j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0);
  if (!ok)
  {
    throw ConfigError(where + ": expected a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

inline FunctionFamily family(const json& j, const std::string& where)
{
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
  {
    throw ConfigError(where + ": expected an object with a string \"kind\"");
  }
  auto const kind = j.at("kind").get<std::string>();
  try
  {
    if (kind == "exp_cost")
    {
      require_object(j, where, {"kind", "scale", "rate"});
      return ExpCost{number(j, where, "scale"), number(j, where, "rate")};
    }
    if (kind == "power_cost")
    {
      require_object(j, where, {"kind", "scale", "exponent", "offset"});
      double const offset = j.contains("offset") ? number(j.at("offset"), where + ".offset") : 0.0;
      return PowerCost{number(j, where, "scale"), number(j, where, "exponent"), offset};
    }
    if (kind == "hyperbolic_noise")
    {
      require_object(j, where, {"kind", "rho"});
      return HyperbolicNoise{number(j, where, "rho")};
    }
    if (kind == "exp_noise")
    {
      require_object(j, where, {"kind", "variance", "rate"});
      return ExpNoise{number(j, where, "variance"), number(j, where, "rate")};
    }
  }
  catch (const ModelError& e)
  {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ": unknown family kind \"" + kind + "\"");
}

// Scalar or length-n array of T.
template <typename T, typename Parse>
std::vector<T> per_sensor(const json& j, const std::string& where, std::size_t n, Parse parse,
                          bool& was_array)
{
  std::vector<T> out;
  if (j.is_array())
  {
    was_array = true;
    if (j.size() != n)
    {
      throw ConfigError(where + ": array length " + std::to_string(j.size()) + " != n = " +
                        std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i)
    {
      out.push_back(parse(j.at(i), where + "[" + std::to_string(i) + "]"));
    }
  }
  else
  {
    out.assign(n, parse(j, where));
  }
  return out;
}

inline GameConfig game(const json& j)
{
  std::string const where = "game";
  require_object(j, where, {"n", "alpha", "cost", "noise", "symmetric"});

  GameConfig out;
  out.n = count(member(j, where, "n"), "game.n");
  if (out.n < 2)
  {
    throw ConfigError("game.n must be >= 2");
  }

  bool arrays = false;
  auto alpha  = per_sensor<double>(member(j, where, "alpha"), "game.alpha", out.n,
                                  [](const json& v, const std::string& w) { return number(v, w); },
                                  arrays);
  auto cost = per_sensor<FunctionFamily>(member(j, where, "cost"), "game.cost", out.n, family, arrays);
  auto noise =
      per_sensor<FunctionFamily>(member(j, where, "noise"), "game.noise", out.n, family, arrays);
  out.per_sensor = arrays;

  for (std::size_t i = 0; i < out.n; ++i)
  {
    try
    {
      out.sensors.emplace_back(alpha[i], cost[i], noise[i]);
    }
    catch (const ModelError& e)
    {
      throw ConfigError("game sensor " + std::to_string(i) + ": " + e.what());
    }
  }

  if (j.contains("symmetric"))
  {
    if (!j.at("symmetric").is_boolean())
    {
      throw ConfigError("game.symmetric: expected a boolean");
    }
    bool identical = true;
    for (auto const& s : out.sensors)
    {
      identical = identical && s == out.sensors.front();
    }
    if (j.at("symmetric").get<bool>() && !identical)
    {
      throw ConfigError("game.symmetric is true but sensors differ");
    }
  }
  return out;
}

inline ContractConfig contract(const json& j, std::size_t n)
{
  require_object(j, "contract", {"gamma", "delta"});
  ContractConfig out;
  bool           arrays = false;
  out.gamma = per_sensor<double>(member(j, "contract", "gamma"), "contract.gamma", n,
                                 [](const json& v, const std::string& w) {
                                   double const g = number(v, w);
                                   if (g < 0.0)
                                   {
                                     throw ConfigError(w + ": must be >= 0");
                                   }
                                   return g;
                                 },
                                 arrays);
  out.delta = per_sensor<std::optional<double>>(
      member(j, "contract", "delta"), "contract.delta", n,
      [](const json& v, const std::string& w) -> std::optional<double> {
        if (v.is_string())
        {
          if (v.get<std::string>() != "ir_floor")
          {
            throw ConfigError(w + ": the only string value allowed is \"ir_floor\"");
          }
          return std::nullopt;
        }
        double const d = number(v, w);
        if (d < 0.0)
        {
          throw ConfigError(w + ": must be >= 0");
        }
        return d;
      },
      arrays);
  return out;
}

inline SweepConfig sweep(const json& j)
{
  std::string const where = "sweep";
  require_object(j, where, {"gamma_min", "gamma_max", "gamma_steps", "n_list", "spacing"});
  SweepConfig out;
  out.gamma_min   = number(j, where, "gamma_min");
  out.gamma_max   = number(j, where, "gamma_max");
  out.gamma_steps = count(member(j, where, "gamma_steps"), "sweep.gamma_steps");
  if (j.contains("spacing"))
  {
    auto const& s = j.at("spacing");
    if (!s.is_string() || (s != "log" && s != "linear"))
    {
      throw ConfigError("sweep.spacing: expected \"log\" or \"linear\"");
    }
    out.log_spacing = s == "log";
  }
  auto const& ns = member(j, where, "n_list");
  if (!ns.is_array() || ns.empty())
  {
    throw ConfigError("sweep.n_list: expected a nonempty array");
  }
  for (std::size_t k = 0; k < ns.size(); ++k)
  {
    auto const n = count(ns.at(k), "sweep.n_list[" + std::to_string(k) + "]");
    if (n < 2)
    {
      throw ConfigError("sweep.n_list: every n must be >= 2");
    }
    out.n_list.push_back(n);
  }
  if (out.gamma_steps < 1)
  {
    throw ConfigError("sweep.gamma_steps must be >= 1");
  }
  if (out.gamma_min < 0.0 || out.gamma_max < out.gamma_min)
  {
    throw ConfigError("sweep: need 0 <= gamma_min <= gamma_max");
  }
  if (out.log_spacing && out.gamma_min <= 0.0)
  {
    throw ConfigError("sweep: log spacing needs gamma_min > 0");
  }
  return out;
}

inline DesignConfig design(const json& j)
{
  require_object(j, "design", {"epsilon", "beta"});
  DesignConfig out;
  if (j.contains("epsilon"))
  {
    out.epsilon = number(j.at("epsilon"), "design.epsilon");
  }
  if (j.contains("beta"))
  {
    out.beta = number(j.at("beta"), "design.beta");
  }
  if (out.epsilon.has_value() == out.beta.has_value())
  {
    throw ConfigError("design: exactly one of \"epsilon\" and \"beta\" must be given");
  }
  return out;
}

inline ScanConfig scan(const json& j, std::size_t n)
{
  std::string const where = "simulate.deviation_scan";
  require_object(j, where, {"sensor", "grid_min", "grid_max", "grid_step", "perturbations"});
  ScanConfig out;
  out.sensor    = count(member(j, where, "sensor"), where + ".sensor");
  out.grid_min  = number(j, where, "grid_min");
  out.grid_max  = number(j, where, "grid_max");
  out.grid_step = number(j, where, "grid_step");
  if (j.contains("perturbations"))
  {
    out.perturbations = count(j.at("perturbations"), where + ".perturbations");
  }
  if (out.sensor >= n)
  {
    throw ConfigError(where + ".sensor out of range");
  }
  if (out.grid_min < 0.0 || out.grid_max < out.grid_min || !(out.grid_step > 0.0))
  {
    throw ConfigError(where + ": need 0 <= grid_min <= grid_max and grid_step > 0");
  }
  if ((out.grid_max - out.grid_min) / out.grid_step > 1e6)
  {
    throw ConfigError(where + ": grid has more than 1e6 points");
  }
  return out;
}

inline SimulateConfig simulate(const json& j, std::size_t n)
{
  std::string const where = "simulate";
  require_object(j, where, {"true_value", "replications", "seed", "noise_shape", "deviation_scan"});
  SimulateConfig out;
  if (j.contains("true_value"))
  {
    out.sim.true_value = number(j.at("true_value"), "simulate.true_value");
  }
  out.sim.replications = count(member(j, where, "replications"), "simulate.replications");
  if (out.sim.replications < 1)
  {
    throw ConfigError("simulate.replications must be >= 1");
  }
  out.sim.seed = count(member(j, where, "seed"), "simulate.seed");
  if (j.contains("noise_shape"))
  {
    auto const& s = j.at("noise_shape");
    if (s == "gaussian")
    {
      out.sim.noise_shape = NoiseShape::Gaussian;
    }
    else if (s == "uniform")
    {
      out.sim.noise_shape = NoiseShape::UniformSymmetric;
    }
    else
    {
      throw ConfigError("simulate.noise_shape: expected \"gaussian\" or \"uniform\"");
    }
  }
  if (j.contains("deviation_scan"))
  {
    out.scan = scan(j.at("deviation_scan"), n);
  }
  return out;
}

}  // namespace detail

/// Parses and validates an experiment config. Unknown keys anywhere in the
/// schema are rejected.
inline ExperimentConfig parse_config(const std::string& text)
{
  nlohmann::json root;
  try
  {
    root = nlohmann::json::parse(text);
  }
  catch (const nlohmann::json::exception& e)
  {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }

  try
  {
    detail::require_object(root, "config",
                           {"game", "contract", "sweep", "design", "simulate", "output"});
    ExperimentConfig cfg;
    cfg.game = detail::game(detail::member(root, "config", "game"));
    if (root.contains("contract"))
    {
      cfg.contract = detail::contract(root.at("contract"), cfg.game.n);
    }
    if (root.contains("sweep"))
    {
      cfg.sweep = detail::sweep(root.at("sweep"));
    }
    if (root.contains("design"))
    {
      cfg.design = detail::design(root.at("design"));
    }
    if (root.contains("simulate"))
    {
      cfg.simulate = detail::simulate(root.at("simulate"), cfg.game.n);
    }
    if (root.contains("output"))
    {
      if (!root.at("output").is_string())
      {
        throw ConfigError("output: expected a string path");
      }
      cfg.output = root.at("output").get<std::string>();
    }
    return cfg;
  }
  catch (const nlohmann::json::exception& e)
  {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

inline ExperimentConfig load_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError("cannot open config file " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace effortcontract::harness
