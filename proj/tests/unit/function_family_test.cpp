#include "effortcontract/function_family.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace effortcontract;

namespace {

std::vector<FunctionFamily> cost_families()
{
  return {ExpCost{1.0, 1.0}, ExpCost{0.3, 2.5}, PowerCost{1.0, 1.0, 0.0}, PowerCost{2.0, 2.0, 0.5},
          PowerCost{0.7, 3.5, 0.0}};
}

std::vector<FunctionFamily> noise_families()
{
  return {HyperbolicNoise{1.0}, HyperbolicNoise{2.0}, HyperbolicNoise{0.2}, ExpNoise{1.0, 1.0},
          ExpNoise{3.0, 0.4}};
}

std::vector<FunctionFamily> all_families()
{
  auto out   = cost_families();
  auto noise = noise_families();
  out.insert(out.end(), noise.begin(), noise.end());
  return out;
}

double central_difference(auto&& fn, double a, double h = 1e-6)
{
  return (fn(a + h) - fn(a - h)) / (2.0 * h);
}

}  // namespace

TEST(FunctionFamily, SpotValues)
{
  FunctionFamily const eta = HyperbolicNoise{1.0};
  FunctionFamily const f   = ExpCost{1.0, 1.0};
  EXPECT_DOUBLE_EQ(eta.value(0.0), 1.0);
  EXPECT_DOUBLE_EQ(f.value(0.0), 1.0);
  EXPECT_DOUBLE_EQ(eta.value(1.0), 0.5);
  EXPECT_DOUBLE_EQ(eta.deriv1(1.0), -0.25);
  EXPECT_DOUBLE_EQ(f.deriv2(0.0), 1.0);
}

TEST(FunctionFamily, Inverses)
{
  EXPECT_NEAR(FunctionFamily(HyperbolicNoise{1.0}).inverse(0.5), 1.0, 1e-12);
  EXPECT_NEAR(FunctionFamily(ExpCost{1.0, 1.0}).inverse(1.0), 0.0, 1e-12);
  EXPECT_NEAR(FunctionFamily(HyperbolicNoise{2.0}).inverse(0.4), 3.0, 1e-12);
}

TEST(FunctionFamily, InverseAgreesWithBisection)
{
  for (auto const& fam : all_families())
  {
    for (double a : {0.0, 0.01, 0.3, 1.0, 2.7, 8.0})
    {
      double const v = fam.value(a);
      double const expected =
          std::visit([&](auto const& fn) { return bisect_inverse(fn, v, fam.is_cost()); },
                     fam.variant());
      EXPECT_NEAR(fam.inverse(v), expected, 1e-9 * std::max(1.0, a)) << fam.name() << " a=" << a;
    }
  }
}

TEST(FunctionFamily, DomainErrors)
{
  for (auto const& fam : all_families())
  {
    EXPECT_THROW(fam.value(-1e-9), DomainError);
    EXPECT_THROW(fam.deriv1(-1.0), DomainError);
    EXPECT_THROW(fam.deriv2(-1.0), DomainError);
  }
}

TEST(FunctionFamily, RangeErrors)
{
  FunctionFamily const eta = HyperbolicNoise{1.0};
  EXPECT_THROW(eta.inverse(1.5), RangeError);
  EXPECT_THROW(eta.inverse(0.0), RangeError);
  EXPECT_THROW(eta.inverse(-0.1), RangeError);
  EXPECT_DOUBLE_EQ(eta.inverse(1.0), 0.0);

  FunctionFamily const f = ExpCost{1.0, 1.0};
  EXPECT_THROW(f.inverse(0.5), RangeError);
  EXPECT_THROW(f.inverse(std::numeric_limits<double>::infinity()), RangeError);

  FunctionFamily const p = PowerCost{1.0, 2.0, 3.0};
  EXPECT_THROW(p.inverse(2.9), RangeError);
  EXPECT_NEAR(p.inverse(7.0), 2.0, 1e-12);
}

TEST(FunctionFamily, RejectsInvalidParameters)
{
  EXPECT_THROW(FunctionFamily(ExpCost{0.0, 1.0}), ModelError);
  EXPECT_THROW(FunctionFamily(ExpCost{1.0, -1.0}), ModelError);
  EXPECT_THROW(FunctionFamily(PowerCost{1.0, 1.5, 0.0}), ModelError);
  EXPECT_THROW(FunctionFamily(PowerCost{1.0, 0.5, 0.0}), ModelError);
  EXPECT_THROW(FunctionFamily(HyperbolicNoise{0.0}), ModelError);
  EXPECT_THROW(FunctionFamily(ExpNoise{1.0, 0.0}), ModelError);
  EXPECT_THROW(FunctionFamily(ExpNoise{-1.0, 1.0}), ModelError);
}

TEST(FunctionFamily, KindQueries)
{
  for (auto const& f : cost_families())
  {
    EXPECT_TRUE(f.is_cost());
    EXPECT_TRUE(f.unbounded_above());
  }
  for (auto const& eta : noise_families())
  {
    EXPECT_TRUE(eta.is_noise());
    EXPECT_FALSE(eta.unbounded_above());
    EXPECT_EQ(eta.infimum(), 0.0);
    EXPECT_EQ(eta.supremum(), eta.value(0.0));
  }
}

TEST(FunctionFamilyProperty, StrictMonotonicity)
{
  std::mt19937_64                        rng(17);
  std::uniform_real_distribution<double> draw(0.0, 20.0);
  for (auto const& fam : all_families())
  {
    for (int k = 0; k < 1000; ++k)
    {
      double a1 = draw(rng);
      double a2 = draw(rng);
      if (a1 == a2)
      {
        continue;
      }
      if (a2 < a1)
      {
        std::swap(a1, a2);
      }
      if (fam.is_cost())
      {
        EXPECT_GT(fam.value(a2), fam.value(a1)) << fam.name();
      }
      else
      {
        EXPECT_LT(fam.value(a2), fam.value(a1)) << fam.name();
        EXPECT_GE(fam.value(a2), 0.0);
      }
    }
  }
}

TEST(FunctionFamilyProperty, InverseRoundTrip)
{
  std::mt19937_64                        rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto const& fam : all_families())
  {
    for (int k = 0; k < 200; ++k)
    {
      double v = 0.0;
      if (fam.is_cost())
      {
        v = fam.value(0.0) * (1.0 + 50.0 * unit(rng));
      }
      else
      {
        v = fam.value(0.0) * (1e-3 + (1.0 - 1e-3) * unit(rng));
      }
      EXPECT_NEAR(fam.value(fam.inverse(v)), v, 1e-10 * std::abs(v)) << fam.name();
    }
  }
}

TEST(FunctionFamilyProperty, DerivativesMatchFiniteDifferences)
{
  std::mt19937_64                        rng(11);
  std::uniform_real_distribution<double> draw(0.05, 5.0);
  for (auto const& fam : all_families())
  {
    for (int k = 0; k < 20; ++k)
    {
      double const a  = draw(rng);
      double const d1 = central_difference([&](double x) { return fam.value(x); }, a);
      double const d2 = central_difference([&](double x) { return fam.deriv1(x); }, a);
      EXPECT_NEAR(fam.deriv1(a), d1, 1e-6 * std::max(1.0, std::abs(d1))) << fam.name();
      EXPECT_NEAR(fam.deriv2(a), d2, 1e-6 * std::max(1.0, std::abs(d2))) << fam.name();
      if (fam.is_cost())
      {
        EXPECT_GT(fam.deriv1(a), 0.0);
      }
      else
      {
        EXPECT_LT(fam.deriv1(a), 0.0);
      }
    }
  }
}
