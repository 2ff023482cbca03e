#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "effortcontract/equilibrium.hpp"
#include "effortcontract/errors.hpp"
#include "effortcontract/game_model.hpp"

namespace effortcontract {

/// Flat payment delta_i at which sensor i's expected utility at the given
/// equilibrium is exactly zero:
///
///     gamma_i * E{(xhat - y_i)^2} + f_i(a_i*) / alpha_i
inline double ir_delta_floor(const GameSpec& spec, const EffortProfile& equilibrium, std::size_t i)
{
  auto const& s = spec.sensor(i);
  return spec.contract(i).gamma * deviation_variance(spec, equilibrium, i) +
         s.cost.value(equilibrium[i]) / s.alpha;
}

/// Copy of spec with every delta_i set to its IR floor at `equilibrium`.
inline GameSpec with_ir_floor(const GameSpec& spec, const EffortProfile& equilibrium)
{
  std::vector<ContractParams> contracts;
  contracts.reserve(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i)
  {
    contracts.emplace_back(spec.contract(i).gamma, ir_delta_floor(spec, equilibrium, i));
  }
  return spec.with_contracts(std::move(contracts));
}

/// Minimal total expected payment for an IR contract reaching quality
/// eta(a*) <= epsilon in a symmetric game: n * f(eta^-1(epsilon)) / alpha.
inline double fundamental_budget(const SensorProfile& profile, std::size_t n, double epsilon)
{
  if (n < 2)
  {
    throw ModelError("fundamental_budget needs n >= 2");
  }
  double const effort = profile.noise.inverse(epsilon);
  return static_cast<double>(n) * profile.cost.value(effort) / profile.alpha;
}

/// Best quality eta(f^-1(beta * alpha / n)) reachable by an IR contract
/// whose budget does not exceed beta.
inline double fundamental_performance(const SensorProfile& profile, std::size_t n, double beta)
{
  if (n < 2)
  {
    throw ModelError("fundamental_performance needs n >= 2");
  }
  double const per_sensor = beta * profile.alpha / static_cast<double>(n);
  if (!(per_sensor >= profile.cost.value(0.0)))
  {
    double const lowest = static_cast<double>(n) * profile.cost.value(0.0) / profile.alpha;
    throw RangeError("budget " + std::to_string(beta) + " below the zero-effort floor " +
                     std::to_string(lowest));
  }
  return profile.noise.value(profile.cost.inverse(per_sensor));
}

struct BudgetReport
{
  double                total_budget = 0.0;
  std::vector<double>   per_sensor_payment;
  double                ir_floor = 0.0;  // sum_i f_i(a_i*) / alpha_i
  std::optional<double> fundamental_floor;
};

/// Total expected payment B = sum_i E{p_i} at the given equilibrium. The
/// fundamental floor is only defined for symmetric games and a target
/// quality epsilon.
inline BudgetReport total_budget(const GameSpec& spec, const EffortProfile& equilibrium,
                                 std::optional<double> epsilon = std::nullopt)
{
  BudgetReport report;
  report.per_sensor_payment.reserve(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i)
  {
    double const p = expected_payment(spec, equilibrium, i);
    report.per_sensor_payment.push_back(p);
    report.total_budget += p;
    report.ir_floor += spec.sensor(i).cost.value(equilibrium[i]) / spec.sensor(i).alpha;
  }
  if (epsilon && spec.is_symmetric())
  {
    report.fundamental_floor = fundamental_budget(spec.sensor(0), spec.size(), *epsilon);
  }
  return report;
}

struct EquilibriumReport
{
  EffortProfile                       efforts;
  double                              estimator_mse = 0.0;  // (1/n^2) sum eta_i(a_i*)
  std::vector<double>                 expected_payment;
  std::vector<double>                 expected_utility;
  double                              total_budget = 0.0;
  std::vector<EquilibriumDiagnostics> diagnostics;
  std::vector<double>                 residuals;
};

inline EquilibriumReport evaluate(const GameSpec& spec, const EquilibriumSolution& solution)
{
  EquilibriumReport report;
  report.efforts       = solution.efforts;
  report.estimator_mse = estimator_mse(spec, solution.efforts);
  report.diagnostics   = solution.diagnostics;
  report.residuals     = solution.residuals;
  for (std::size_t i = 0; i < spec.size(); ++i)
  {
    report.expected_payment.push_back(expected_payment(spec, solution.efforts, i));
    report.expected_utility.push_back(expected_utility(spec, solution.efforts, i));
    report.total_budget += report.expected_payment.back();
  }
  return report;
}

/// Checks eta''(a) f'(a_eps) - f''(a) eta'(a_eps) > 0 on the sampled
/// convexity grid (plus a = 0).
inline bool design_convexity_ok(const SensorProfile& profile, double target_effort)
{
  double const cost_slope  = profile.cost.deriv1(target_effort);
  double const noise_slope = profile.noise.deriv1(target_effort);
  auto holds = [&](double a) {
    return profile.noise.deriv2(a) * cost_slope - profile.cost.deriv2(a) * noise_slope > 0.0;
  };
  if (!holds(0.0))
  {
    return false;
  }
  for (int k = 0; k < kConvexityGridPoints; ++k)
  {
    if (!holds(convexity_grid_point(k)))
    {
      return false;
    }
  }
  return true;
}

/// The designed game is re-solved close to machine precision so that the
/// realized budget can be compared with the fundamental floor.
inline constexpr double kDesignTolerance = 1e-15;

struct DesignedContract
{
  ContractParams    contract;
  std::size_t       n             = 0;
  double            epsilon       = 0.0;
  double            target_effort = 0.0;  // eta^-1(epsilon)
  double            quality       = 0.0;  // eta(a*) at the re-solved equilibrium
  double            fundamental_floor = 0.0;
  EquilibriumReport predicted;
};

/// Budget-optimal contract for a symmetric game reaching eta(a*) = epsilon:
///
///     gamma = -(n/(n-1))^2 f'(a_eps) / (alpha eta'(a_eps))
///     delta = gamma (n-1) epsilon / n + f(a_eps) / alpha
///
/// with a_eps = eta^-1(epsilon). The report comes from re-solving the
/// equilibrium of the designed game, not from the construction.
inline DesignedContract design_optimal_contract(const SensorProfile& profile, std::size_t n,
                                                double epsilon, double tol = kDesignTolerance)
{
  if (n < 2)
  {
    throw ModelError("design_optimal_contract needs n >= 2");
  }
  if (!profile.cost.unbounded_above())
  {
    throw SolverError("cost family is bounded above");
  }
  double const upper = profile.noise.supremum();
  double const lower = profile.noise.infimum();
  if (!(epsilon > lower && epsilon <= upper))
  {
    throw RangeError("epsilon " + std::to_string(epsilon) + " outside the attainable interval (" +
                     std::to_string(lower) + ", " + std::to_string(upper) + "]");
  }

  double const target = profile.noise.inverse(epsilon);
  if (!design_convexity_ok(profile, target))
  {
    throw SolverError("optimal-contract convexity condition fails on the sampled grid");
  }

  auto const   nd    = static_cast<double>(n);
  double const ratio = nd / (nd - 1.0);
  double const gamma = -ratio * ratio * profile.cost.deriv1(target) /
                       (profile.alpha * profile.noise.deriv1(target));
  double const delta = gamma * (nd - 1.0) * epsilon / nd + profile.cost.value(target) / profile.alpha;

  DesignedContract out;
  out.contract          = ContractParams(gamma, delta);
  out.n                 = n;
  out.epsilon           = epsilon;
  out.target_effort     = target;
  out.fundamental_floor = fundamental_budget(profile, n, epsilon);

  auto const game  = GameSpec::symmetric(n, profile, out.contract);
  out.predicted    = evaluate(game, solve_equilibrium(game, tol));
  out.quality      = profile.noise.value(out.predicted.efforts[0]);
  return out;
}

}  // namespace effortcontract
