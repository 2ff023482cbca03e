#pragma once

#include <stdexcept>
#include <string>

namespace effortcontract {

// Argument outside the domain of a function (negative effort, bad index).
class DomainError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

// Requested value not attainable by a family or a design target.
class RangeError : public std::range_error
{
public:
  using std::range_error::range_error;
};

// No minimizer could be located: bounded cost or runaway bracket.
class SolverError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters for a family, profile, contract, or game.
class ModelError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace effortcontract
