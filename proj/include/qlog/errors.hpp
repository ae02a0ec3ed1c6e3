#pragma once

#include <stdexcept>
#include <string>

namespace qlog {

// Argument outside the mathematical domain of an operation (convergence
// radius, parity of an index, q <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

// An iterative procedure (series certificate, Newton, continuation) gave up.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qlog
