#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nomocou {

struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Two ions at the same point: Coulomb energy and its derivatives diverge.
struct SingularConfiguration : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConvergenceError : NumericalFailure {
  using NumericalFailure::NumericalFailure;
};

struct InstabilityError : NumericalFailure {
  InstabilityError(const std::string& what, int mode)
      : NumericalFailure(what), mode_index(mode) {}
  int mode_index;
};

struct IntegrationFailure : NumericalFailure {
  IntegrationFailure(const std::string& what, double t)
      : NumericalFailure(what), time_reached(t) {}
  double time_reached;
};

// A one-dimensional search found no interior minimum; samples are (parameter, objective).
struct SearchFailure : NumericalFailure {
  SearchFailure(const std::string& what, std::vector<std::pair<double, double>> s)
      : NumericalFailure(what), samples(std::move(s)) {}
  std::vector<std::pair<double, double>> samples;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nomocou
