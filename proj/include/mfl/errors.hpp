#pragma once

#include <stdexcept>
#include <string>

namespace mfl {

// Raised when an estimator or metric is asked for a dimension it does not
// support (the KDE and quadrature tools are one-dimensional).
class UnsupportedDimension : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Raised when particles or values stop being finite, or a quadrature grid
// cannot be refined enough.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what, long epoch = -1)
      : std::runtime_error(what), epoch_(epoch) {}
  long epoch() const { return epoch_; }

 private:
  long epoch_;
};

void require(bool condition, const std::string& message);

}  // namespace mfl
