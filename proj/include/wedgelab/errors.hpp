#pragma once

#include <stdexcept>
#include <string>

namespace wedgelab {

// Structural problem with an input: bad sizes, signs, row sums, file schema.
struct ValidationError : std::invalid_argument {
  explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

struct DimensionError : ValidationError {
  explicit DimensionError(const std::string& msg) : ValidationError(msg) {}
};

// A survival product vanished: the chain cannot be normalized past this state.
struct DeadChainError : std::runtime_error {
  int level;
  int state;
  DeadChainError(const std::string& msg, int level_, int state_)
      : std::runtime_error(msg), level(level_), state(state_) {}
};

// A uniform lower bound required by the reverse-limit machinery failed;
// carries the offending level and state pair.
struct ConditionViolationError : std::runtime_error {
  int level;
  int x;
  int x_tilde;
  ConditionViolationError(const std::string& msg, int level_, int x_, int xt_)
      : std::runtime_error(msg), level(level_), x(x_), x_tilde(xt_) {}
};

// Spread did not reach the requested tolerance within the chain horizon.
struct HorizonExhaustedError : std::runtime_error {
  int k;
  double lo;
  double hi;
  HorizonExhaustedError(const std::string& msg, int k_, double lo_, double hi_)
      : std::runtime_error(msg), k(k_), lo(lo_), hi(hi_) {}
};

struct RejectionBudgetError : std::runtime_error {
  explicit RejectionBudgetError(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested an operation outside the supported alpha-star regime.
struct RegimeError : std::runtime_error {
  explicit RegimeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Point or stencil left the geometric domain of definition.
struct DomainError : std::invalid_argument {
  explicit DomainError(const std::string& msg) : std::invalid_argument(msg) {}
};

struct SimulationError : std::runtime_error {
  explicit SimulationError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace wedgelab
