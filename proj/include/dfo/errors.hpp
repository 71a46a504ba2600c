#pragma once

#include <stdexcept>
#include <string>

namespace dfo {

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct BudgetExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RankDeficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IrreparableSet : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroPredictedDecrease : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RoundBudgetExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedObjectiveCount : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct EmptyResults : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dfo
