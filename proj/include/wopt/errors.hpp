#pragma once

#include <stdexcept>
#include <string>

namespace wopt {

// Input violates a documented precondition (bad dimension, unsorted data, ...).
class domain_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Operation requires d == expected.
class dimension_error : public domain_error {
public:
  dimension_error(std::size_t got, std::size_t expected)
      : domain_error("dimension mismatch: got d=" + std::to_string(got) +
                     ", expected d=" + std::to_string(expected)) {}
};

// A Lipschitz constant below the data-dependent lower bound was requested.
class constraint_error : public std::runtime_error {
public:
  constraint_error(double k, double k_lower)
      : std::runtime_error("K=" + std::to_string(k) +
                           " is below the feasibility bound K_lower=" +
                           std::to_string(k_lower)),
        k_requested(k), k_lower_bound(k_lower) {}
  double k_requested;
  double k_lower_bound;
};

// Instance is too large for the requested exact algorithm.
class size_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Iterative solver exhausted its budget without reaching the tolerance.
class convergence_error : public std::runtime_error {
public:
  convergence_error(const std::string& what, double residual_)
      : std::runtime_error(what + " (final residual " + std::to_string(residual_) + ")"),
        residual(residual_) {}
  double residual;
};

// A constructed object failed one of its own consistency checks.
class construction_error : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

} // namespace wopt
