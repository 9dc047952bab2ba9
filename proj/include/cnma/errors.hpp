#pragma once

#include <stdexcept>
#include <string>

namespace cnma {

/// Malformed or inconsistent user input (CSV, labels, config). CLI exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A model that cannot be fitted to the given network (e.g. a joint NMA on a
/// disconnected network, negative degrees of freedom). CLI exit code 3.
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical breakdown inside the solver. CLI exit code 4.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cnma
