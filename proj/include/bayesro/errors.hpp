#pragma once

#include <stdexcept>
#include <string>

namespace bayesro {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid numeric argument (probability outside its range, nonpositive scale, ...).
struct DomainError : Error {
  using Error::Error;
};

// Malformed caller-supplied data (label out of range, length mismatch, ragged CSV).
struct InputError : Error {
  using Error::Error;
};

// Iterative method exhausted its budget without meeting its tolerance.
struct ConvergenceError : Error {
  using Error::Error;
};

// Posterior mode sits on the boundary of the parameter space, or the observed
// information is not positive definite there.
struct BoundaryModeError : Error {
  using Error::Error;
};

// Credible region does not intersect the feasible parameter set.
struct InfeasibleRegionError : Error {
  using Error::Error;
};

struct EmptySetError : Error {
  using Error::Error;
};

// A theorem hypothesis required by a construction does not hold for the inputs.
struct HypothesisError : Error {
  using Error::Error;
};

// A caller-supplied callback violated its documented contract.
struct ContractViolationError : Error {
  using Error::Error;
};

// Queue is unstable (mean interarrival does not exceed mean service).
struct InstabilityError : Error {
  using Error::Error;
};

struct SolverError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct DataError : Error {
  using Error::Error;
};

}  // namespace bayesro
