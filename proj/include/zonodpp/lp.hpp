#ifndef ZONODPP_LP_HPP
#define ZONODPP_LP_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace zonodpp::lp {

// Absolute feasibility tolerance on equality constraints and variable bounds.
inline constexpr double kFeasTol = 1e-9;
// Threshold below which a variable is considered to sit exactly at a bound.
inline constexpr double kBoundTol = 1e-12;
// Reduced-cost threshold for optimality and tie detection.
inline constexpr double kOptTol = 1e-9;

enum class VarStatus : std::uint8_t {
  AtLower,
  AtUpper,
  Basic,
  NonbasicFree,  // free variable resting at 0
};

// min c^T x  s.t.  A x = b,  lower <= x <= upper.
// Bounds may be +-infinity; lower == upper pins a variable.
struct LinearProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int num_rows() const { return static_cast<int>(a.rows()); }
  int num_vars() const { return static_cast<int>(a.cols()); }
};

struct SolveOptions {
  // Optional warm start: per-variable statuses from a previous solve of an LP
  // with the same constraint matrix. Must mark exactly m variables Basic and
  // yield a nonsingular, bound-feasible basis; otherwise the solver silently
  // falls back to a cold start.
  const std::vector<VarStatus>* warm_status = nullptr;
  // When true, a zero reduced cost on a movable nonbasic variable at the
  // optimum raises TieError: the optimal vertex is not unique and the caller
  // must perturb the objective.
  bool detect_ties = false;
  // Hard pivot cap; 0 picks max(1000, 50 * (m + k)).
  int max_pivots = 0;
};

struct LpSolution {
  Eigen::VectorXd x;
  double objective = 0.0;
  std::vector<VarStatus> status;  // per structural variable
  std::vector<int> basis;         // basic variable indices in row order
  int phase1_pivots = 0;
  int phase2_pivots = 0;
  bool warm_started = false;
};

// Primal simplex for bounded variables: Phase I with artificials, then
// Phase II. Dantzig pricing, switching to Bland after 10 * (m + k) pivots.
// Throws SolverError on infeasible / unbounded / pivot-limit problems and
// TieError when detect_ties fires.
LpSolution solve(const LinearProgram& lp, const SolveOptions& opts = {});

// Max violation of A x = b and the bounds; for tests and sanity checks.
double violation(const LinearProgram& lp, const Eigen::VectorXd& x);

}  // namespace zonodpp::lp

#endif
