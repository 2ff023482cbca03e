#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <string>
#include <variant>

#include "effortcontract/errors.hpp"

namespace effortcontract {

/// Smooth scalar map on a >= 0 with analytic first and second derivatives.
template <typename F>
concept ScalarFunction = requires(const F& fn, double a) {
  { fn.value(a) } -> std::convertible_to<double>;
  { fn.deriv1(a) } -> std::convertible_to<double>;
  { fn.deriv2(a) } -> std::convertible_to<double>;
};

/// Effort cost a -> c * exp(rate * a).
struct ExpCost
{
  double scale = 1.0;
  double rate  = 1.0;

  double value(double a) const { return scale * std::exp(rate * a); }
  double deriv1(double a) const { return scale * rate * std::exp(rate * a); }
  double deriv2(double a) const { return scale * rate * rate * std::exp(rate * a); }
  double inverse(double v) const { return std::log(v / scale) / rate; }

  bool operator==(const ExpCost&) const = default;
};

/// Effort cost a -> c * a^q + c0.
///
/// Only q = 1 or q >= 2 are accepted: for 1 < q < 2 the second derivative
/// blows up at a = 0.
struct PowerCost
{
  double scale    = 1.0;
  double exponent = 2.0;
  double offset   = 0.0;

  double value(double a) const { return scale * std::pow(a, exponent) + offset; }

  double deriv1(double a) const
  {
    if (exponent == 1.0)
    {
      return scale;
    }
    return scale * exponent * std::pow(a, exponent - 1.0);
  }

  double deriv2(double a) const
  {
    if (exponent == 1.0)
    {
      return 0.0;
    }
    if (exponent == 2.0)
    {
      return 2.0 * scale;
    }
    return scale * exponent * (exponent - 1.0) * std::pow(a, exponent - 2.0);
  }

  double inverse(double v) const { return std::pow((v - offset) / scale, 1.0 / exponent); }

  bool operator==(const PowerCost&) const = default;
};

/// Noise variance a -> rho / (rho + a).
struct HyperbolicNoise
{
  double rho = 1.0;

  double value(double a) const { return rho / (rho + a); }

  double deriv1(double a) const
  {
    double const d = rho + a;
    return -rho / (d * d);
  }

  double deriv2(double a) const
  {
    double const d = rho + a;
    return 2.0 * rho / (d * d * d);
  }

  double inverse(double v) const { return rho / v - rho; }

  bool operator==(const HyperbolicNoise&) const = default;
};

/// Noise variance a -> sigma0^2 * exp(-rate * a).
struct ExpNoise
{
  double variance = 1.0;
  double rate     = 1.0;

  double value(double a) const { return variance * std::exp(-rate * a); }
  double deriv1(double a) const { return -rate * variance * std::exp(-rate * a); }
  double deriv2(double a) const { return rate * rate * variance * std::exp(-rate * a); }
  double inverse(double v) const { return std::log(variance / v) / rate; }

  bool operator==(const ExpNoise&) const = default;
};

/// Inverts a strictly monotone function by geometric bracket growth from
/// [0, 1] followed by bisection. Used for families without a closed-form
/// inverse and as an independent check of the analytic ones.
template <ScalarFunction F>
double bisect_inverse(const F& fn, double target, bool increasing, double abs_tol = 1e-12)
{
  auto below = [&](double a) {
    double const v = fn.value(a);
    return increasing ? v < target : v > target;
  };

  if (!below(0.0))
  {
    if (fn.value(0.0) == target)
    {
      return 0.0;
    }
    throw RangeError("bisect_inverse: target below the value at a = 0");
  }

  double lo = 0.0;
  double hi = 1.0;
  while (below(hi))
  {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300)
    {
      throw RangeError("bisect_inverse: target not attained");
    }
  }

  while (hi - lo > abs_tol)
  {
    double const mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi)
    {
      break;
    }
    (below(mid) ? lo : hi) = mid;
  }
  return lo + 0.5 * (hi - lo);
}

/// One of the built-in cost or noise-variance families.
///
/// Construction validates parameters and checks the monotonicity direction
/// by the sign of the analytic derivative on a sample grid. Values are
/// immutable and cheap to copy.
class FunctionFamily
{
public:
  using Variant = std::variant<ExpCost, PowerCost, HyperbolicNoise, ExpNoise>;

  FunctionFamily(ExpCost fn) : impl_(fn)
  {
    require(fn.scale > 0.0 && std::isfinite(fn.scale), "ExpCost scale must be positive");
    require(fn.rate > 0.0 && std::isfinite(fn.rate), "ExpCost rate must be positive");
    check_monotone();
  }

  FunctionFamily(PowerCost fn) : impl_(fn)
  {
    require(fn.scale > 0.0 && std::isfinite(fn.scale), "PowerCost scale must be positive");
    require(fn.exponent == 1.0 || (fn.exponent >= 2.0 && std::isfinite(fn.exponent)),
            "PowerCost exponent must be 1 or >= 2");
    require(std::isfinite(fn.offset), "PowerCost offset must be finite");
    check_monotone();
  }

  FunctionFamily(HyperbolicNoise fn) : impl_(fn)
  {
    require(fn.rho > 0.0 && std::isfinite(fn.rho), "HyperbolicNoise rho must be positive");
    check_monotone();
  }

  FunctionFamily(ExpNoise fn) : impl_(fn)
  {
    require(fn.variance > 0.0 && std::isfinite(fn.variance), "ExpNoise variance must be positive");
    require(fn.rate > 0.0 && std::isfinite(fn.rate), "ExpNoise rate must be positive");
    check_monotone();
  }

  bool is_cost() const
  {
    return std::holds_alternative<ExpCost>(impl_) || std::holds_alternative<PowerCost>(impl_);
  }

  bool is_noise() const { return !is_cost(); }

  // Every built-in cost family diverges as a -> infinity.
  bool unbounded_above() const { return is_cost(); }

  // inf over a >= 0: the limit at infinity for noise kinds, f(0) for costs.
  double infimum() const { return is_cost() ? value(0.0) : 0.0; }

  double supremum() const
  {
    return is_cost() ? std::numeric_limits<double>::infinity() : value(0.0);
  }

  std::string name() const
  {
    return std::visit(
        [](const auto& fn) -> std::string {
          using T = std::decay_t<decltype(fn)>;
          if constexpr (std::is_same_v<T, ExpCost>)
            return "exp_cost";
          else if constexpr (std::is_same_v<T, PowerCost>)
            return "power_cost";
          else if constexpr (std::is_same_v<T, HyperbolicNoise>)
            return "hyperbolic_noise";
          else
            return "exp_noise";
        },
        impl_);
  }

  double value(double a) const
  {
    check_domain(a);
    return std::visit([a](const auto& fn) { return fn.value(a); }, impl_);
  }

  double deriv1(double a) const
  {
    check_domain(a);
    return std::visit([a](const auto& fn) { return fn.deriv1(a); }, impl_);
  }

  double deriv2(double a) const
  {
    check_domain(a);
    return std::visit([a](const auto& fn) { return fn.deriv2(a); }, impl_);
  }

  /// Effort at which the family takes value v.
  ///
  /// Costs accept v in [f(0), inf); noise families accept v in (0, eta(0)].
  double inverse(double v) const
  {
    if (!std::isfinite(v))
    {
      throw RangeError("inverse: value must be finite");
    }
    double const at_zero = value(0.0);
    if (is_cost() ? v < at_zero : (v > at_zero || v <= 0.0))
    {
      throw RangeError("inverse: " + std::to_string(v) + " outside the range of " + name());
    }
    if (v == at_zero)
    {
      return 0.0;
    }
    double const a = std::visit([v](const auto& fn) { return fn.inverse(v); }, impl_);
    return a > 0.0 ? a : 0.0;
  }

  const Variant& variant() const { return impl_; }

  bool operator==(const FunctionFamily&) const = default;

private:
  static void require(bool ok, const char* what)
  {
    if (!ok)
    {
      throw ModelError(what);
    }
  }

  static void check_domain(double a)
  {
    if (!(a >= 0.0))
    {
      throw DomainError("effort must be nonnegative, got " + std::to_string(a));
    }
  }

  void check_monotone() const
  {
    bool const increasing = is_cost();
    // Geometric grid over (0, 1e4]; a = 0 is excluded since f'(0) = 0 for q > 1.
    constexpr int kPoints = 256;
    for (int k = 0; k < kPoints; ++k)
    {
      double const a  = 1e-6 * std::pow(1e10, static_cast<double>(k) / (kPoints - 1));
      double const d1 = deriv1(a);
      if (std::isnan(d1))
      {
        continue;
      }
      // Noise derivatives may underflow to -0 far out; only a wrong sign fails.
      if (increasing ? !(d1 > 0.0) : d1 > 0.0)
      {
        throw ModelError(name() + " violates its monotonicity direction");
      }
    }
  }

  Variant impl_;
};

}  // namespace effortcontract
