#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "effortcontract/contract_design.hpp"
#include "effortcontract/equilibrium.hpp"
#include "effortcontract/game_model.hpp"
#include "effortcontract/harness/config.hpp"
#include "effortcontract/harness/csv.hpp"
#include "effortcontract/simulation.hpp"

namespace effortcontract::harness {

namespace detail {

inline const SensorProfile& common_profile(const GameConfig& game, const char* command)
{
  for (auto const& s : game.sensors)
  {
    if (!(s == game.sensors.front()))
    {
      throw ConfigError(std::string(command) + " needs identical sensors (a symmetric game)");
    }
  }
  return game.sensors.front();
}

inline double design_epsilon(const GameConfig& game, const DesignConfig& design)
{
  auto const& profile = common_profile(game, "design");
  if (design.epsilon)
  {
    return *design.epsilon;
  }
  return fundamental_performance(profile, game.n, *design.beta);
}

struct PreparedGame
{
  GameSpec            spec;
  EquilibriumSolution solution;
};

/// Builds the game from an explicit contract (resolving "ir_floor" deltas
/// at the equilibrium) or from a design block.
inline PreparedGame prepare_game(const ExperimentConfig& cfg, double tol)
{
  std::vector<SensorProfile> sensors = cfg.game.sensors;
  if (cfg.contract)
  {
    std::vector<ContractParams> contracts;
    for (std::size_t i = 0; i < cfg.game.n; ++i)
    {
      contracts.emplace_back(cfg.contract->gamma[i], cfg.contract->delta[i].value_or(0.0));
    }
    GameSpec spec(sensors, contracts);
    auto     solution = solve_equilibrium(spec, tol);
    // delta does not move the equilibrium, so the floor can be set afterwards.
    for (std::size_t i = 0; i < cfg.game.n; ++i)
    {
      if (!cfg.contract->delta[i])
      {
        contracts[i].delta = ir_delta_floor(spec, solution.efforts, i);
      }
    }
    return {GameSpec(std::move(sensors), std::move(contracts)), std::move(solution)};
  }
  if (cfg.design)
  {
    auto const& profile = common_profile(cfg.game, "design");
    auto const  design  = design_optimal_contract(profile, cfg.game.n,
                                                  design_epsilon(cfg.game, *cfg.design), tol);
    auto        spec    = GameSpec::symmetric(cfg.game.n, profile, design.contract);
    auto        solution = solve_equilibrium(spec, tol);
    return {std::move(spec), std::move(solution)};
  }
  throw ConfigError("config needs a \"contract\" or a \"design\" block");
}

}  // namespace detail

/// One row per sensor with the equilibrium effort and its diagnostics.
inline std::string cmd_equilibrium(const ExperimentConfig& cfg, double tol = kDefaultTolerance)
{
  auto const prepared = detail::prepare_game(cfg, tol);
  auto const& spec    = prepared.spec;
  auto const& sol     = prepared.solution;
  auto const  n       = static_cast<double>(spec.size());

  CsvTable table({"sensor", "gamma", "delta", "a_star", "boundary", "xi_residual",
                  "mse_contribution"});
  for (std::size_t i = 0; i < spec.size(); ++i)
  {
    double const a = sol.efforts[i];
    table.add({static_cast<long long>(i), spec.contract(i).gamma, spec.contract(i).delta, a,
               sol.diagnostics[i].boundary_solution, sol.residuals[i],
               spec.sensor(i).noise.value(a) / (n * n)});
  }
  return table.str();
}

/// Symmetric sweep over gamma for each n, with delta at the IR floor.
///
/// Columns vs gamma give effort, estimator MSE and budget curves; mse vs
/// budget gives the performance/budget trade-off.
inline std::string cmd_sweep(const ExperimentConfig& cfg, double tol = kDefaultTolerance)
{
  if (!cfg.sweep)
  {
    throw ConfigError("sweep command needs a \"sweep\" block");
  }
  auto const& profile = detail::common_profile(cfg.game, "sweep");

  CsvTable table({"n", "gamma", "delta", "a_star", "mse", "budget", "expected_payment",
                  "expected_utility", "boundary"});
  for (std::size_t n : cfg.sweep->n_list)
  {
    for (double gamma : cfg.sweep->gammas())
    {
      auto const probe = GameSpec::symmetric(n, profile, ContractParams(gamma, 0.0));
      auto const sol   = solve_equilibrium(probe, tol);
      double const delta = ir_delta_floor(probe, sol.efforts, 0);
      auto const spec    = GameSpec::symmetric(n, profile, ContractParams(gamma, delta));
      auto const report  = evaluate(spec, sol);
      table.add({static_cast<long long>(n), gamma, delta, sol.efforts[0], report.estimator_mse,
                 report.total_budget, report.expected_payment[0], report.expected_utility[0],
                 sol.diagnostics[0].boundary_solution});
    }
  }
  return table.str();
}

/// Budget-optimal contract for a target quality epsilon, or for the best
/// quality a budget beta allows.
inline std::string cmd_design(const ExperimentConfig& cfg, double tol = kDefaultTolerance)
{
  if (!cfg.design)
  {
    throw ConfigError("design command needs a \"design\" block");
  }
  auto const& profile = detail::common_profile(cfg.game, "design");
  std::size_t const n = cfg.game.n;

  double const epsilon = detail::design_epsilon(cfg.game, *cfg.design);
  auto const   design  = design_optimal_contract(profile, n, epsilon, tol);
  auto const&  pred    = design.predicted;

  if (cfg.design->beta)
  {
    CsvTable table({"n", "beta", "performance_limit", "epsilon", "gamma", "delta", "effort", "mse",
                    "estimator_mse", "budget", "fundamental_floor"});
    table.add({static_cast<long long>(n), *cfg.design->beta, epsilon, epsilon,
               design.contract.gamma, design.contract.delta, pred.efforts[0], design.quality,
               pred.estimator_mse, pred.total_budget, design.fundamental_floor});
    return table.str();
  }
  CsvTable table({"n", "epsilon", "gamma", "delta", "effort", "mse", "estimator_mse", "budget",
                  "fundamental_floor"});
  table.add({static_cast<long long>(n), epsilon, design.contract.gamma, design.contract.delta,
             pred.efforts[0], design.quality, pred.estimator_mse, pred.total_budget,
             design.fundamental_floor});
  return table.str();
}

/// Analytic vs Monte-Carlo comparison at the equilibrium, with an optional
/// deviation scan for one sensor.
inline std::string cmd_simulate(const ExperimentConfig& cfg, double tol = kDefaultTolerance)
{
  if (!cfg.simulate)
  {
    throw ConfigError("simulate command needs a \"simulate\" block");
  }
  auto const  prepared = detail::prepare_game(cfg, tol);
  auto const& spec     = prepared.spec;
  auto const& efforts  = prepared.solution.efforts;
  auto const& sim_cfg  = cfg.simulate->sim;
  auto const  result   = simulate(spec, efforts, sim_cfg);

  CsvTable table({"section", "quantity", "sensor", "effort", "analytic", "empirical", "std_error",
                  "pass"});
  using Cell     = CsvTable::Cell;
  auto const mse = estimator_mse(spec, efforts);
  table.add({std::string("moments"), std::string("mse"), Cell{}, Cell{}, mse,
             result.empirical_mse.mean, result.empirical_mse.std_error,
             result.empirical_mse.agrees_with(mse)});
  for (std::size_t i = 0; i < spec.size(); ++i)
  {
    auto const expected = expected_payment(spec, efforts, i);
    auto const& est     = result.empirical_payment[i];
    table.add({std::string("moments"), std::string("payment"), static_cast<long long>(i),
               efforts[i], expected, est.mean, est.std_error, est.agrees_with(expected)});
  }
  for (std::size_t i = 0; i < spec.size(); ++i)
  {
    auto const expected = expected_utility(spec, efforts, i);
    auto const& est     = result.empirical_utility[i];
    table.add({std::string("moments"), std::string("utility"), static_cast<long long>(i),
               efforts[i], expected, est.mean, est.std_error, est.agrees_with(expected)});
  }

  if (cfg.simulate->scan)
  {
    auto const& scan = *cfg.simulate->scan;
    auto const  grid = scan.grid();
    std::size_t const i = scan.sensor;

    auto const a_star = efforts[i];
    auto const points = deviation_scan(spec, efforts, i, grid, sim_cfg);
    for (auto const& pt : points)
    {
      auto const expected = expected_utility(spec, efforts.with(i, pt.effort), i);
      table.add({std::string("deviation_scan"), std::string("utility"), static_cast<long long>(i),
                 pt.effort, expected, pt.utility.mean, pt.utility.std_error,
                 pt.utility.agrees_with(expected)});
    }

    auto argmax_row = [&](const std::string& label, double argmax) {
      bool const within = std::abs(argmax - a_star) <= scan.grid_step * (1.0 + 1e-9);
      table.add({std::string("deviation_argmax"), label, static_cast<long long>(i), Cell{}, a_star,
                 argmax, Cell{}, within});
    };
    argmax_row("equilibrium", scan_argmax(points));

    // Other sensors' efforts redrawn at random; the argmax must not move.
    std::mt19937_64 rng(sim_cfg.seed);
    double const    spread = 2.0 * std::max(1.0, *std::max_element(efforts.values().begin(),
                                                                    efforts.values().end()));
    std::uniform_real_distribution<double> draw(0.0, spread);
    for (std::uint64_t k = 1; k <= scan.perturbations; ++k)
    {
      std::vector<double> perturbed(efforts.values().begin(), efforts.values().end());
      for (std::size_t j = 0; j < perturbed.size(); ++j)
      {
        double const v = draw(rng);
        if (j != i)
        {
          perturbed[j] = v;
        }
      }
      SimConfig sub = sim_cfg;
      sub.seed      = SplitMix64(sim_cfg.seed + k)();
      auto const p  = deviation_scan(spec, EffortProfile(perturbed), i, grid, sub);
      argmax_row("perturbation_" + std::to_string(k), scan_argmax(p));
    }
  }
  return table.str();
}

}  // namespace effortcontract::harness
