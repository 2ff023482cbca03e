#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "effortcontract/errors.hpp"
#include "effortcontract/function_family.hpp"

namespace effortcontract {

/// One sensor: value-of-compensation alpha, effort cost f, noise variance eta.
struct SensorProfile
{
  double         alpha;
  FunctionFamily cost;
  FunctionFamily noise;

  SensorProfile(double alpha_, FunctionFamily cost_, FunctionFamily noise_)
    : alpha(alpha_), cost(std::move(cost_)), noise(std::move(noise_))
  {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
    {
      throw ModelError("alpha must be positive");
    }
    if (!cost.is_cost())
    {
      throw ModelError("sensor cost must be a cost family, got " + cost.name());
    }
    if (!noise.is_noise())
    {
      throw ModelError("sensor noise must be a noise family, got " + noise.name());
    }
  }

  bool operator==(const SensorProfile&) const = default;
};

/// Quadratic-deviation contract p = delta - gamma * (xhat - y)^2.
struct ContractParams
{
  double gamma = 0.0;
  double delta = 0.0;

  ContractParams() = default;

  ContractParams(double gamma_, double delta_) : gamma(gamma_), delta(delta_)
  {
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
    {
      throw ModelError("contract gamma must be nonnegative");
    }
    if (!(delta >= 0.0) || !std::isfinite(delta))
    {
      throw ModelError("contract delta must be nonnegative");
    }
  }

  bool operator==(const ContractParams&) const = default;
};

/// Nonnegative effort per sensor.
class EffortProfile
{
public:
  EffortProfile() = default;

  explicit EffortProfile(std::vector<double> efforts) : efforts_(std::move(efforts))
  {
    for (double a : efforts_)
    {
      if (!(a >= 0.0) || !std::isfinite(a))
      {
        throw DomainError("efforts must be finite and nonnegative");
      }
    }
  }

  static EffortProfile uniform(std::size_t n, double a)
  {
    return EffortProfile(std::vector<double>(n, a));
  }

  std::size_t size() const { return efforts_.size(); }
  double operator[](std::size_t i) const { return efforts_[i]; }
  std::span<const double> values() const { return efforts_; }

  /// Copy with sensor i's effort replaced.
  EffortProfile with(std::size_t i, double a) const
  {
    auto copy = efforts_;
    copy.at(i) = a;
    return EffortProfile(std::move(copy));
  }

  bool operator==(const EffortProfile&) const = default;

private:
  std::vector<double> efforts_;
};

/// The contract game: n >= 2 sensors, one contract each.
///
/// The symmetric flag is derived from the contents; constructing with an
/// explicit flag that disagrees with the contents is an error.
class GameSpec
{
public:
  GameSpec(std::vector<SensorProfile> sensors, std::vector<ContractParams> contracts)
    : sensors_(std::move(sensors)), contracts_(std::move(contracts))
  {
    if (sensors_.size() < 2)
    {
      throw ModelError("a contract game needs at least 2 sensors");
    }
    if (sensors_.size() != contracts_.size())
    {
      throw ModelError("sensor and contract lists differ in length");
    }
    symmetric_ = detect_symmetry();
  }

  GameSpec(std::vector<SensorProfile> sensors, std::vector<ContractParams> contracts,
           bool claimed_symmetric)
    : GameSpec(std::move(sensors), std::move(contracts))
  {
    if (claimed_symmetric != symmetric_)
    {
      throw ModelError("symmetric flag inconsistent with sensor and contract contents");
    }
  }

  static GameSpec symmetric(std::size_t n, const SensorProfile& sensor, ContractParams contract)
  {
    return GameSpec(std::vector<SensorProfile>(n, sensor),
                    std::vector<ContractParams>(n, contract));
  }

  std::size_t size() const { return sensors_.size(); }
  bool is_symmetric() const { return symmetric_; }

  const SensorProfile& sensor(std::size_t i) const { return sensors_.at(i); }
  const ContractParams& contract(std::size_t i) const { return contracts_.at(i); }
  std::span<const SensorProfile> sensors() const { return sensors_; }
  std::span<const ContractParams> contracts() const { return contracts_; }

  GameSpec with_contracts(std::vector<ContractParams> contracts) const
  {
    return GameSpec(sensors_, std::move(contracts));
  }

private:
  bool detect_symmetry() const
  {
    for (std::size_t i = 1; i < sensors_.size(); ++i)
    {
      if (!(sensors_[i] == sensors_[0]) || !(contracts_[i] == contracts_[0]))
      {
        return false;
      }
    }
    return true;
  }

  std::vector<SensorProfile>  sensors_;
  std::vector<ContractParams> contracts_;
  bool                        symmetric_ = false;
};

namespace detail {

inline void check_lengths(const GameSpec& spec, const EffortProfile& efforts)
{
  if (spec.size() != efforts.size())
  {
    throw ModelError("effort profile length " + std::to_string(efforts.size()) +
                     " does not match game size " + std::to_string(spec.size()));
  }
}

inline void check_index(const GameSpec& spec, std::size_t i)
{
  if (i >= spec.size())
  {
    throw DomainError("sensor index " + std::to_string(i) + " out of range");
  }
}

}  // namespace detail

/// Squared-error of the averaging estimator: (1/n^2) * sum_i eta_i(a_i).
inline double estimator_mse(const GameSpec& spec, const EffortProfile& efforts)
{
  detail::check_lengths(spec, efforts);
  double sum = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i)
  {
    sum += spec.sensor(i).noise.value(efforts[i]);
  }
  auto const n = static_cast<double>(spec.size());
  return sum / (n * n);
}

/// E{(xhat - y_i)^2} = ((n-1)/n)^2 eta_i(a_i) + (1/n^2) sum_{j != i} eta_j(a_j).
///
/// Measurement noises are uncorrelated, so cross terms vanish.
inline double deviation_variance(const GameSpec& spec, const EffortProfile& efforts, std::size_t i)
{
  detail::check_lengths(spec, efforts);
  detail::check_index(spec, i);
  auto const n    = static_cast<double>(spec.size());
  double     rest = 0.0;
  for (std::size_t j = 0; j < spec.size(); ++j)
  {
    if (j != i)
    {
      rest += spec.sensor(j).noise.value(efforts[j]);
    }
  }
  double const own = (n - 1.0) / n;
  return own * own * spec.sensor(i).noise.value(efforts[i]) + rest / (n * n);
}

inline double expected_payment(const GameSpec& spec, const EffortProfile& efforts, std::size_t i)
{
  detail::check_index(spec, i);
  auto const& c = spec.contract(i);
  return c.delta - c.gamma * deviation_variance(spec, efforts, i);
}

/// Expected utility alpha_i * E{p_i} - f_i(a_i).
inline double expected_utility(const GameSpec& spec, const EffortProfile& efforts, std::size_t i)
{
  detail::check_index(spec, i);
  auto const& s = spec.sensor(i);
  auto const& c = spec.contract(i);
  double const penalty = s.alpha * c.gamma * deviation_variance(spec, efforts, i);
  return s.alpha * c.delta - (penalty + s.cost.value(efforts[i]));
}

}  // namespace effortcontract
