#pragma once

#include <stdexcept>
#include <string>

namespace dirac {

/// Base energy outside the open positive band, or at the excluded level.
class EnergyError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A sampled family lost the monotone ordering in lambda (step size too coarse).
class MonotonicityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The strict Prufer branch guard was violated (|Gamma_j| >= 1/2).
class ContractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sine counting did not settle onto the 2*pi lattice before the horizon.
class NotConvergedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dirac
