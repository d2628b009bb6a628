#ifndef ZONODPP_ERRORS_HPP
#define ZONODPP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace zonodpp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid user-facing configuration (bad config file, bad CLI flags).
struct ConfigError : Error {
  using Error::Error;
};

// Simplex cycling guard exceeded or basis breakdown.
struct SolverError : Error {
  using Error::Error;
};

// The equality-plus-box system has no solution.
struct InfeasibleError : SolverError {
  using SolverError::SolverError;
};

// The objective is unbounded over the feasible polytope.
struct UnboundedError : SolverError {
  using SolverError::SolverError;
};

// Two optimal bases detected for the tiling LP; the tiling objective
// must be redrawn with a fresh seed.
struct TieError : Error {
  using Error::Error;
};

// A chain point failed the zonotope membership LP: corrupted chain state.
struct NotInZonotopeError : Error {
  using Error::Error;
};

// Numerical breakdown (rank loss, negative conditional mass, ...).
struct NumericalError : Error {
  using Error::Error;
};

}  // namespace zonodpp

#endif
