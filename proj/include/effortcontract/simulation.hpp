#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "effortcontract/errors.hpp"
#include "effortcontract/game_model.hpp"

namespace effortcontract {

enum class NoiseShape
{
  Gaussian,
  UniformSymmetric,
};

struct SimConfig
{
  double        true_value   = 0.0;
  std::uint64_t replications = 100000;
  std::uint64_t seed         = 0;
  NoiseShape    noise_shape  = NoiseShape::Gaussian;
};

/// Sample mean with standard error sample-std / sqrt(R).
struct Estimate
{
  double mean      = 0.0;
  double std_error = 0.0;

  /// |mean - expected| <= bands * std_error; a zero standard error demands equality.
  bool agrees_with(double expected, double bands = 4.0) const
  {
    return std::abs(mean - expected) <= bands * std_error;
  }
};

/// Welford accumulator. Adding a constant leaves the mean bit-exact.
class RunningStat
{
public:
  void add(double x)
  {
    ++count_;
    double const d = x - mean_;
    mean_ += d / static_cast<double>(count_);
    m2_ += d * (x - mean_);
  }

  std::uint64_t count() const { return count_; }

  Estimate estimate() const
  {
    if (count_ < 2)
    {
      return {mean_, 0.0};
    }
    double const var = m2_ / static_cast<double>(count_ - 1);
    return {mean_, std::sqrt(var / static_cast<double>(count_))};
  }

private:
  std::uint64_t count_ = 0;
  double        mean_  = 0.0;
  double        m2_    = 0.0;
};

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator so the
/// standard distributions can draw from it.
class SplitMix64
{
public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()()
  {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z               = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z               = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

private:
  std::uint64_t state_;
};

/// Independent stream for (seed, sensor, replication). Streams do not depend
/// on the order in which replications are evaluated.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t sensor, std::uint64_t replication)
{
  SplitMix64 mix(seed);
  std::uint64_t key = mix() ^ (sensor * 0xd1b54a32d192ed03ULL);
  key               = SplitMix64(key)() ^ (replication * 0x8cb92ba72f3d8dd7ULL);
  return SplitMix64(SplitMix64(key)());
}

/// Zero-mean, unit-variance draw of the requested shape.
inline double standard_noise(SplitMix64& gen, NoiseShape shape)
{
  if (shape == NoiseShape::Gaussian)
  {
    std::normal_distribution<double> dist(0.0, 1.0);
    return dist(gen);
  }
  // U(-sqrt(3), sqrt(3)) has unit variance.
  std::uniform_real_distribution<double> dist(-std::sqrt(3.0), std::sqrt(3.0));
  return dist(gen);
}

struct SimResult
{
  Estimate              empirical_mse;
  std::vector<Estimate> empirical_payment;
  std::vector<Estimate> empirical_utility;
  std::vector<Estimate> noise_mean;      // E{w_i}
  std::vector<Estimate> noise_variance;  // E{w_i^2}
  std::uint64_t         replications_used = 0;
};

/// Monte-Carlo sensing round: y_i = x + w_i with Var(w_i) = eta_i(a_i),
/// xhat = mean(y), p_i = delta_i - gamma_i (xhat - y_i)^2, utility
/// alpha_i p_i - f_i(a_i). Replications run in index order so the result
/// is bit-reproducible.
inline SimResult simulate(const GameSpec& spec, const EffortProfile& efforts, const SimConfig& cfg)
{
  if (efforts.size() != spec.size())
  {
    throw ModelError("effort profile length does not match game size");
  }
  if (cfg.replications < 1)
  {
    throw ModelError("replications must be >= 1");
  }

  std::size_t const n = spec.size();
  std::vector<double> scale(n);
  std::vector<double> cost(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    scale[i] = std::sqrt(spec.sensor(i).noise.value(efforts[i]));
    cost[i]  = spec.sensor(i).cost.value(efforts[i]);
  }

  RunningStat              mse;
  std::vector<RunningStat> payment(n), utility(n), w_mean(n), w_var(n);
  std::vector<double>      y(n);

  for (std::uint64_t r = 0; r < cfg.replications; ++r)
  {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
      auto         gen = substream(cfg.seed, i, r);
      double const w   = scale[i] * standard_noise(gen, cfg.noise_shape);
      y[i]             = cfg.true_value + w;
      sum += y[i];
      w_mean[i].add(w);
      w_var[i].add(w * w);
    }
    double const estimate = sum / static_cast<double>(n);
    double const err      = cfg.true_value - estimate;
    mse.add(err * err);

    for (std::size_t i = 0; i < n; ++i)
    {
      auto const&  c   = spec.contract(i);
      double const dev = estimate - y[i];
      double const p   = c.delta - c.gamma * dev * dev;
      payment[i].add(p);
      utility[i].add(spec.sensor(i).alpha * p - cost[i]);
    }
  }

  SimResult out;
  out.empirical_mse     = mse.estimate();
  out.replications_used = cfg.replications;
  for (std::size_t i = 0; i < n; ++i)
  {
    out.empirical_payment.push_back(payment[i].estimate());
    out.empirical_utility.push_back(utility[i].estimate());
    out.noise_mean.push_back(w_mean[i].estimate());
    out.noise_variance.push_back(w_var[i].estimate());
  }
  return out;
}

struct DeviationPoint
{
  double   effort = 0.0;
  Estimate utility;
};

/// Re-simulates sensor i's utility at each effort in `grid`, holding the
/// other efforts fixed. Every grid point sees the same standardized noise
/// draws (common random numbers); only sensor i's noise scale changes.
inline std::vector<DeviationPoint> deviation_scan(const GameSpec& spec, const EffortProfile& efforts,
                                                  std::size_t i, std::span<const double> grid,
                                                  const SimConfig& cfg)
{
  if (i >= spec.size())
  {
    throw DomainError("deviation_scan: sensor index out of range");
  }
  if (efforts.size() != spec.size())
  {
    throw ModelError("effort profile length does not match game size");
  }
  if (grid.empty())
  {
    throw ModelError("deviation_scan: empty grid");
  }
  if (cfg.replications < 1)
  {
    throw ModelError("replications must be >= 1");
  }

  std::size_t const n = spec.size();
  auto const&       s = spec.sensor(i);
  auto const&       c = spec.contract(i);

  std::vector<double> own_scale, own_cost;
  for (double a : grid)
  {
    own_scale.push_back(std::sqrt(s.noise.value(a)));
    own_cost.push_back(s.cost.value(a));
  }
  std::vector<double> other_scale(n);
  for (std::size_t j = 0; j < n; ++j)
  {
    other_scale[j] = j == i ? 0.0 : std::sqrt(spec.sensor(j).noise.value(efforts[j]));
  }

  double const             nd = static_cast<double>(n);
  std::vector<RunningStat> stats(grid.size());
  for (std::uint64_t r = 0; r < cfg.replications; ++r)
  {
    double others = 0.0;
    double z_own  = 0.0;
    for (std::size_t j = 0; j < n; ++j)
    {
      auto         gen = substream(cfg.seed, j, r);
      double const z   = standard_noise(gen, cfg.noise_shape);
      if (j == i)
      {
        z_own = z;
      }
      else
      {
        others += other_scale[j] * z;
      }
    }
    for (std::size_t k = 0; k < grid.size(); ++k)
    {
      double const w_own = own_scale[k] * z_own;
      // xhat - y_i = (sum_j w_j) / n - w_i
      double const dev = (others + w_own) / nd - w_own;
      double const p   = c.delta - c.gamma * dev * dev;
      stats[k].add(s.alpha * p - own_cost[k]);
    }
  }

  std::vector<DeviationPoint> out;
  out.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
  {
    out.push_back({grid[k], stats[k].estimate()});
  }
  return out;
}

/// Grid effort with the highest mean utility (first one on ties).
inline double scan_argmax(std::span<const DeviationPoint> scan)
{
  if (scan.empty())
  {
    throw ModelError("scan_argmax: empty scan");
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < scan.size(); ++k)
  {
    if (scan[k].utility.mean > scan[best].utility.mean)
    {
      best = k;
    }
  }
  return scan[best].effort;
}

}  // namespace effortcontract
