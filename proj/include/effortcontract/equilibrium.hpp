#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "effortcontract/errors.hpp"
#include "effortcontract/game_model.hpp"

namespace effortcontract {

/// Sampled-convexity grid: 1024 geometric points on [1e-6, 1e4].
inline constexpr int    kConvexityGridPoints = 1024;
inline constexpr double kConvexityGridLow    = 1e-6;
inline constexpr double kConvexityGridHigh   = 1e4;

/// Hard cap on bracket expansion; exceeding it counts as an existence failure.
inline constexpr double kMaxEffort = 1e6;

inline constexpr double kDefaultTolerance = 1e-10;

inline double convexity_grid_point(int k)
{
  double const span = kConvexityGridHigh / kConvexityGridLow;
  return kConvexityGridLow * std::pow(span, static_cast<double>(k) / (kConvexityGridPoints - 1));
}

/// The quantity each sensor minimizes:
///
///     xi(a) = alpha * gamma * ((n-1)/n)^2 * eta(a) + f(a)
///
/// The expected utility is alpha*delta minus xi(a_i) minus a term that only
/// depends on the other sensors, so minimizing xi is the best response
/// whatever the others do.
class BestResponseObjective
{
public:
  BestResponseObjective(SensorProfile sensor, double gamma, std::size_t n)
    : sensor_(std::move(sensor)), gamma_(gamma), n_(n)
  {
    if (n_ < 2)
    {
      throw ModelError("best-response objective needs n >= 2");
    }
    if (!(gamma_ >= 0.0) || !std::isfinite(gamma_))
    {
      throw ModelError("gamma must be nonnegative");
    }
    auto const own = (static_cast<double>(n_) - 1.0) / static_cast<double>(n_);
    weight_        = sensor_.alpha * gamma_ * own * own;
  }

  static BestResponseObjective for_sensor(const GameSpec& spec, std::size_t i)
  {
    return {spec.sensor(i), spec.contract(i).gamma, spec.size()};
  }

  const SensorProfile& sensor() const { return sensor_; }
  double gamma() const { return gamma_; }
  std::size_t n() const { return n_; }

  // alpha * gamma * ((n-1)/n)^2
  double noise_weight() const { return weight_; }

  double value(double a) const { return weight_ * sensor_.noise.value(a) + sensor_.cost.value(a); }
  double deriv1(double a) const { return weight_ * sensor_.noise.deriv1(a) + sensor_.cost.deriv1(a); }
  double deriv2(double a) const { return weight_ * sensor_.noise.deriv2(a) + sensor_.cost.deriv2(a); }

private:
  SensorProfile sensor_;
  double        gamma_;
  std::size_t   n_;
  double        weight_ = 0.0;
};

inline double xi_value(const BestResponseObjective& obj, double a) { return obj.value(a); }
inline double xi_deriv1(const BestResponseObjective& obj, double a) { return obj.deriv1(a); }
inline double xi_deriv2(const BestResponseObjective& obj, double a) { return obj.deriv2(a); }

struct EquilibriumDiagnostics
{
  bool existence_ok        = false;  // cost unbounded above
  bool interior_ok         = false;  // xi'(0) < 0
  bool strict_convexity_ok = false;  // xi'' > 0 on the sampled grid
  bool boundary_solution   = false;  // reported a* = 0
  bool oracle_fallback     = false;  // a* came from grid_oracle

  bool operator==(const EquilibriumDiagnostics&) const = default;
};

inline EquilibriumDiagnostics check_conditions(const BestResponseObjective& obj)
{
  EquilibriumDiagnostics diag;
  diag.existence_ok = obj.sensor().cost.unbounded_above();
  diag.interior_ok  = obj.deriv1(0.0) < 0.0;

  diag.strict_convexity_ok = true;
  for (int k = 0; k < kConvexityGridPoints; ++k)
  {
    if (!(obj.deriv2(convexity_grid_point(k)) > 0.0))
    {
      diag.strict_convexity_ok = false;
      break;
    }
  }
  return diag;
}

/// Brute-force minimizer of xi: uniform grid of `points` nodes on [0, a_max],
/// then three rounds of 10x zoom around the incumbent. Ties go to the
/// smaller effort.
inline double grid_oracle(const BestResponseObjective& obj, double a_max, std::size_t points)
{
  if (points < 2 || !(a_max > 0.0))
  {
    throw ModelError("grid_oracle needs a_max > 0 and at least 2 points");
  }

  auto scan = [&](double lo, double hi, std::size_t count, double& best_a) {
    double const step  = (hi - lo) / static_cast<double>(count - 1);
    double       best  = obj.value(lo);
    best_a             = lo;
    for (std::size_t k = 1; k < count; ++k)
    {
      double const a = std::min(hi, lo + step * static_cast<double>(k));
      double const v = obj.value(a);
      if (v < best)
      {
        best   = v;
        best_a = a;
      }
    }
    return step;
  };

  double best_a = 0.0;
  double step   = scan(0.0, a_max, points, best_a);
  for (int round = 0; round < 3; ++round)
  {
    double const lo = std::max(0.0, best_a - step);
    double const hi = std::min(a_max, best_a + step);
    auto const count =
        static_cast<std::size_t>(std::llround((hi - lo) / (step / 10.0))) + 1;
    step = scan(lo, hi, std::max<std::size_t>(count, 2), best_a);
  }
  return best_a;
}

/// Smallest A (doubling from 1) with xi(A) > xi(0) and xi'(A) > 0; every
/// minimizer of xi lies in [0, A].
inline double descent_bound(const BestResponseObjective& obj)
{
  double const at_zero = obj.value(0.0);
  double       bound   = 1.0;
  while (!(obj.value(bound) > at_zero && obj.deriv1(bound) > 0.0))
  {
    bound *= 2.0;
    if (bound > kMaxEffort)
    {
      throw SolverError("no bound on the best response below a_max = 1e6");
    }
  }
  return bound;
}

struct BestResponse
{
  double                 effort = 0.0;
  EquilibriumDiagnostics diagnostics;
  double                 residual = 0.0;  // |xi'(effort)|, 0 at the boundary
};

namespace detail {

// Root of xi' in [lo, hi] given xi'(lo) < 0 <= xi'(hi). Stops when both the
// residual and the bracket are within tol, or the bracket reaches adjacent
// doubles.
inline double bisect_first_order(const BestResponseObjective& obj, double lo, double hi, double tol)
{
  double mid = lo + 0.5 * (hi - lo);
  double d1  = obj.deriv1(mid);
  while (!(hi - lo <= tol && std::abs(d1) <= tol))
  {
    if (d1 == 0.0)
    {
      break;
    }
    (d1 < 0.0 ? lo : hi) = mid;
    double const next    = lo + 0.5 * (hi - lo);
    if (next <= lo || next >= hi)
    {
      break;
    }
    mid = next;
    d1  = obj.deriv1(mid);
  }

  // Once the bracket is exhausted, report whichever point fits best.
  for (double cand : {lo, hi})
  {
    if (cand > 0.0 && std::abs(obj.deriv1(cand)) < std::abs(d1))
    {
      mid = cand;
      d1  = obj.deriv1(cand);
    }
  }
  return mid;
}

}  // namespace detail

/// Minimizer of xi over a >= 0.
///
/// Under strict convexity with xi'(0) < 0 the root of xi' is bracketed by
/// doubling from [0, 1] and bisected to tol. With xi'(0) >= 0 and convexity
/// the minimizer is a = 0. When sampled convexity fails, grid_oracle on
/// [0, descent_bound] locates the minimizer, which is then polished by
/// bisection if xi' changes sign across the neighbouring grid nodes.
inline BestResponse solve_best_response(const BestResponseObjective& obj,
                                        double tol = kDefaultTolerance)
{
  BestResponse out;
  out.diagnostics = check_conditions(obj);
  auto& diag      = out.diagnostics;

  if (!diag.existence_ok)
  {
    throw SolverError("cost family is bounded above; no equilibrium guarantee");
  }

  if (!diag.strict_convexity_ok)
  {
    constexpr std::size_t kOraclePoints = 100000;
    diag.oracle_fallback = true;
    double const bound   = descent_bound(obj);
    double       a       = grid_oracle(obj, bound, kOraclePoints);
    if (a > 0.0)
    {
      double const step = bound / static_cast<double>(kOraclePoints - 1);
      double const lo   = std::max(0.0, a - step);
      double const hi   = a + step;
      if (obj.deriv1(lo) < 0.0 && obj.deriv1(hi) >= 0.0)
      {
        a = detail::bisect_first_order(obj, lo, hi, tol);
      }
    }
    out.effort             = a;
    diag.boundary_solution = a == 0.0;
    out.residual           = diag.boundary_solution ? 0.0 : std::abs(obj.deriv1(a));
    return out;
  }

  if (!diag.interior_ok)
  {
    out.effort             = 0.0;
    diag.boundary_solution = true;
    return out;
  }

  double lo = 0.0;
  double hi = 1.0;
  while (obj.deriv1(hi) < 0.0)
  {
    lo = hi;
    hi *= 2.0;
    if (hi > kMaxEffort)
    {
      throw SolverError("bracket expansion exceeded a_max = 1e6");
    }
  }

  out.effort   = detail::bisect_first_order(obj, lo, hi, tol);
  out.residual = std::abs(obj.deriv1(out.effort));
  return out;
}

struct EquilibriumSolution
{
  EffortProfile                       efforts;
  std::vector<EquilibriumDiagnostics> diagnostics;
  std::vector<double>                 residuals;
};

/// Per-sensor best responses. Best responses do not depend on the other
/// sensors, so this profile is the contract equilibrium (and each effort is
/// a dominant strategy).
inline EquilibriumSolution solve_equilibrium(const GameSpec& spec, double tol = kDefaultTolerance)
{
  std::vector<double> efforts(spec.size());
  EquilibriumSolution out;
  out.diagnostics.resize(spec.size());
  out.residuals.resize(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i)
  {
    auto const br      = solve_best_response(BestResponseObjective::for_sensor(spec, i), tol);
    efforts[i]         = br.effort;
    out.diagnostics[i] = br.diagnostics;
    out.residuals[i]   = br.residual;
  }

  if (spec.is_symmetric())
  {
    auto const [lo, hi] = std::minmax_element(efforts.begin(), efforts.end());
    if (*hi - *lo > tol)
    {
      throw SolverError("symmetric game produced an asymmetric equilibrium");
    }
  }

  out.efforts = EffortProfile(std::move(efforts));
  return out;
}

/// da*/dgamma from implicit differentiation of the first-order condition:
///
///     -alpha ((n-1)/n)^2 eta'(a*) / (alpha gamma ((n-1)/n)^2 eta''(a*) + f''(a*))
///
/// Requires an interior equilibrium under strict convexity.
inline double equilibrium_sensitivity(const BestResponseObjective& obj, double a_star)
{
  auto const diag = check_conditions(obj);
  if (!diag.strict_convexity_ok || !diag.interior_ok || !(a_star > 0.0))
  {
    throw ModelError("equilibrium_sensitivity needs an interior equilibrium under strict convexity");
  }
  auto const   n   = static_cast<double>(obj.n());
  double const own = (n - 1.0) / n;
  double const num = -obj.sensor().alpha * own * own * obj.sensor().noise.deriv1(a_star);
  return num / obj.deriv2(a_star);
}

}  // namespace effortcontract
