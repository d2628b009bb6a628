#include "zonodpp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "zonodpp/errors.hpp"

namespace zonodpp::lp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Pivot elements smaller than this are treated as zero in the ratio test and
// when driving artificials out of the basis.
constexpr double kPivotTol = 1e-11;

struct Simplex {
  // Structural variables occupy [0, k); artificials [k, k + m).
  int m, k, total;
  Eigen::MatrixXd a;   // m x total
  Eigen::VectorXd b;   // m
  Eigen::VectorXd c;   // total, current phase objective
  Eigen::VectorXd lo;  // total
  Eigen::VectorXd hi;  // total
  std::vector<VarStatus> status;
  std::vector<int> basic;       // m entries, variable index per row
  std::vector<int> basic_row;   // total entries, row of a basic var or -1
  Eigen::VectorXd x;            // total, current values
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  int pivots = 0;
  int bland_after = 0;
  int max_pivots = 0;

  void refactor() {
    Eigen::MatrixXd bmat(m, m);
    for (int i = 0; i < m; ++i) bmat.col(i) = a.col(basic[i]);
    lu.compute(bmat);
    const Eigen::VectorXd d = lu.matrixLU().diagonal().cwiseAbs();
    if (d.minCoeff() <= d.maxCoeff() * 1e-13) {
      throw SolverError("simplex basis matrix is numerically singular");
    }
  }

  // Recompute every basic value exactly from the nonbasic ones. Done each
  // iteration; the systems here are tiny and this avoids drift.
  void compute_values() {
    Eigen::VectorXd rhs = b;
    for (int j = 0; j < total; ++j) {
      if (basic_row[j] >= 0) continue;
      const double v = nonbasic_value(j);
      x[j] = v;
      if (v != 0.0) rhs -= a.col(j) * v;
    }
    const Eigen::VectorXd xb = lu.solve(rhs);
    for (int i = 0; i < m; ++i) x[basic[i]] = xb[i];
  }

  double nonbasic_value(int j) const {
    switch (status[j]) {
      case VarStatus::AtLower:
        return lo[j];
      case VarStatus::AtUpper:
        return hi[j];
      case VarStatus::NonbasicFree:
        return 0.0;
      case VarStatus::Basic:
        break;
    }
    throw SolverError("inconsistent nonbasic status");
  }

  double objective_value() const {
    double obj = 0.0;
    for (int j = 0; j < total; ++j) obj += c[j] * x[j];
    return obj;
  }

  Eigen::VectorXd duals() const {
    Eigen::VectorXd cb(m);
    for (int i = 0; i < m; ++i) cb[i] = c[basic[i]];
    return lu.transpose().solve(cb);
  }

  // Runs the current phase to optimality. Entering candidates are structural
  // variables only; artificials may leave but never re-enter.
  void optimize() {
    for (;;) {
      if (pivots > max_pivots) {
        throw SolverError("simplex pivot limit exceeded (" +
                          std::to_string(max_pivots) + ")");
      }
      refactor();
      compute_values();
      const Eigen::VectorXd y = duals();

      const bool bland = pivots >= bland_after;
      int enter = -1;
      int dir = 0;  // +1 the entering variable increases, -1 it decreases
      double best = kOptTol;
      for (int j = 0; j < k; ++j) {
        if (basic_row[j] >= 0) continue;
        if (lo[j] == hi[j]) continue;  // pinned, cannot move
        const double d = c[j] - a.col(j).dot(y);
        double viol = 0.0;
        int cand_dir = 0;
        switch (status[j]) {
          case VarStatus::AtLower:
            if (d < -kOptTol) viol = -d, cand_dir = +1;
            break;
          case VarStatus::AtUpper:
            if (d > kOptTol) viol = d, cand_dir = -1;
            break;
          case VarStatus::NonbasicFree:
            if (std::abs(d) > kOptTol) viol = std::abs(d), cand_dir = d < 0 ? +1 : -1;
            break;
          case VarStatus::Basic:
            break;
        }
        if (cand_dir == 0) continue;
        if (bland) {
          enter = j;
          dir = cand_dir;
          break;
        }
        if (viol > best) {
          best = viol;
          enter = j;
          dir = cand_dir;
        }
      }
      if (enter < 0) return;  // optimal for this phase

      const Eigen::VectorXd w = lu.solve(a.col(enter));

      // Ratio test: step t >= 0 along the entering direction, limited by the
      // entering variable's opposite bound and by basic variables hitting
      // theirs. Ties go to the smallest leaving variable index.
      double t_flip = kInf;
      if (std::isfinite(lo[enter]) && std::isfinite(hi[enter])) {
        t_flip = hi[enter] - lo[enter];
      }
      double t_min = kInf;
      int leave_row = -1;
      VarStatus leave_to = VarStatus::AtLower;
      for (int i = 0; i < m; ++i) {
        const double delta = -dir * w[i];  // basic value change per unit t
        const int bj = basic[i];
        double t_i = kInf;
        VarStatus to = VarStatus::AtLower;
        if (delta < -kPivotTol && std::isfinite(lo[bj])) {
          t_i = (x[bj] - lo[bj]) / (-delta);
          to = VarStatus::AtLower;
        } else if (delta > kPivotTol && std::isfinite(hi[bj])) {
          t_i = (hi[bj] - x[bj]) / delta;
          to = VarStatus::AtUpper;
        }
        if (t_i == kInf) continue;
        t_i = std::max(t_i, 0.0);
        if (t_i < t_min - kBoundTol ||
            (t_i < t_min + kBoundTol && (leave_row < 0 || bj < basic[leave_row]))) {
          t_min = std::min(t_i, t_min);
          leave_row = i;
          leave_to = to;
        }
      }

      if (t_flip <= t_min) {
        if (t_flip == kInf) {
          throw UnboundedError("linear program is unbounded");
        }
        status[enter] = status[enter] == VarStatus::AtLower ? VarStatus::AtUpper
                                                            : VarStatus::AtLower;
        ++pivots;
        continue;
      }
      if (leave_row < 0) {
        throw UnboundedError("linear program is unbounded");
      }

      const int leave = basic[leave_row];
      const double enter_from = nonbasic_value(enter);
      basic[leave_row] = enter;
      basic_row[enter] = leave_row;
      basic_row[leave] = -1;
      status[enter] = VarStatus::Basic;
      status[leave] = leave_to;
      if (leave >= k) {
        // Artificial that left the basis is pinned out for good.
        lo[leave] = hi[leave] = 0.0;
        status[leave] = VarStatus::AtLower;
      }
      x[enter] = enter_from + dir * t_min;
      ++pivots;
    }
  }

  // Pivot structural variables into rows still held by artificials. A t = 0
  // exchange; values do not move. Fails only if a constraint row is
  // linearly dependent on the others.
  void drive_out_artificials() {
    for (int i = 0; i < m; ++i) {
      if (basic[i] < k) continue;
      refactor();
      Eigen::VectorXd ei = Eigen::VectorXd::Zero(m);
      ei[i] = 1.0;
      const Eigen::VectorXd row = lu.transpose().solve(ei);
      int enter = -1;
      for (int j = 0; j < k; ++j) {
        if (basic_row[j] >= 0) continue;
        if (std::abs(row.dot(a.col(j))) > kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) {
        throw SolverError("constraint rows are linearly dependent");
      }
      const int leave = basic[i];
      basic[i] = enter;
      basic_row[enter] = i;
      basic_row[leave] = -1;
      status[enter] = VarStatus::Basic;
      status[leave] = VarStatus::AtLower;
      lo[leave] = hi[leave] = 0.0;
    }
  }
};

void validate(const LinearProgram& lp) {
  const int m = lp.num_rows();
  const int k = lp.num_vars();
  if (m < 1 || k < 1) throw SolverError("empty linear program");
  if (lp.b.size() != m || lp.c.size() != k || lp.lower.size() != k ||
      lp.upper.size() != k) {
    throw SolverError("linear program dimension mismatch");
  }
  if (!lp.a.allFinite() || !lp.b.allFinite() || !lp.c.allFinite()) {
    throw SolverError("linear program has non-finite data");
  }
  for (int j = 0; j < k; ++j) {
    if (std::isnan(lp.lower[j]) || std::isnan(lp.upper[j]) ||
        lp.lower[j] > lp.upper[j]) {
      throw SolverError("inconsistent bounds on variable " + std::to_string(j));
    }
  }
}

// Tries to seed the simplex from warm statuses. Returns true when the implied
// basis is nonsingular and bound-feasible, in which case Phase I is skipped.
bool try_warm_start(Simplex& s, const std::vector<VarStatus>& warm) {
  if (static_cast<int>(warm.size()) != s.k) return false;
  std::vector<int> basics;
  for (int j = 0; j < s.k; ++j) {
    switch (warm[j]) {
      case VarStatus::Basic:
        basics.push_back(j);
        break;
      case VarStatus::AtLower:
        if (!std::isfinite(s.lo[j])) return false;
        break;
      case VarStatus::AtUpper:
        if (!std::isfinite(s.hi[j])) return false;
        break;
      case VarStatus::NonbasicFree:
        if (std::isfinite(s.lo[j]) || std::isfinite(s.hi[j])) return false;
        break;
    }
  }
  if (static_cast<int>(basics.size()) != s.m) return false;

  Eigen::MatrixXd bmat(s.m, s.m);
  for (int i = 0; i < s.m; ++i) bmat.col(i) = s.a.col(basics[i]);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(bmat);
  const Eigen::VectorXd d = lu.matrixLU().diagonal().cwiseAbs();
  if (d.minCoeff() <= d.maxCoeff() * 1e-12 || d.maxCoeff() == 0.0) return false;

  Eigen::VectorXd rhs = s.b;
  for (int j = 0; j < s.k; ++j) {
    if (warm[j] == VarStatus::Basic) continue;
    const double v = warm[j] == VarStatus::AtLower   ? s.lo[j]
                     : warm[j] == VarStatus::AtUpper ? s.hi[j]
                                                     : 0.0;
    if (v != 0.0) rhs -= s.a.col(j) * v;
  }
  const Eigen::VectorXd xb = lu.solve(rhs);
  for (int i = 0; i < s.m; ++i) {
    const int j = basics[i];
    if (xb[i] < s.lo[j] - kFeasTol || xb[i] > s.hi[j] + kFeasTol) return false;
  }

  for (int j = 0; j < s.k; ++j) s.status[j] = warm[j];
  for (int i = 0; i < s.m; ++i) {
    s.basic[i] = basics[i];
    s.basic_row[basics[i]] = i;
  }
  // Artificials stay pinned at zero.
  for (int j = s.k; j < s.total; ++j) {
    s.status[j] = VarStatus::AtLower;
    s.lo[j] = s.hi[j] = 0.0;
  }
  return true;
}

void cold_start(Simplex& s) {
  for (int j = 0; j < s.k; ++j) {
    if (std::isfinite(s.lo[j])) {
      s.status[j] = VarStatus::AtLower;
    } else if (std::isfinite(s.hi[j])) {
      s.status[j] = VarStatus::AtUpper;
    } else {
      s.status[j] = VarStatus::NonbasicFree;
    }
  }
  Eigen::VectorXd residual = s.b;
  for (int j = 0; j < s.k; ++j) {
    const double v = s.nonbasic_value(j);
    if (v != 0.0) residual -= s.a.col(j) * v;
  }
  for (int i = 0; i < s.m; ++i) {
    const int j = s.k + i;
    s.a.col(j).setZero();
    s.a(i, j) = residual[i] >= 0.0 ? 1.0 : -1.0;
    s.lo[j] = 0.0;
    s.hi[j] = kInf;
    s.status[j] = VarStatus::Basic;
    s.basic[i] = j;
    s.basic_row[j] = i;
  }
}

}  // namespace

LpSolution solve(const LinearProgram& lp, const SolveOptions& opts) {
  validate(lp);
  const int m = lp.num_rows();
  const int k = lp.num_vars();

  Simplex s;
  s.m = m;
  s.k = k;
  s.total = k + m;
  s.a.resize(m, s.total);
  s.a.leftCols(k) = lp.a;
  s.a.rightCols(m).setZero();
  s.b = lp.b;
  s.c = Eigen::VectorXd::Zero(s.total);
  s.lo.resize(s.total);
  s.hi.resize(s.total);
  s.lo.head(k) = lp.lower;
  s.hi.head(k) = lp.upper;
  s.lo.tail(m).setZero();
  s.hi.tail(m).setZero();
  s.status.assign(s.total, VarStatus::AtLower);
  s.basic.assign(m, -1);
  s.basic_row.assign(s.total, -1);
  s.x = Eigen::VectorXd::Zero(s.total);
  s.bland_after = 10 * (m + k);
  s.max_pivots = opts.max_pivots > 0 ? opts.max_pivots
                                     : std::max(1000, 50 * (m + k));

  LpSolution sol;
  const bool warm =
      opts.warm_status != nullptr && try_warm_start(s, *opts.warm_status);
  sol.warm_started = warm;
  if (!warm) {
    cold_start(s);
    s.c.setZero();
    s.c.tail(m).setOnes();
    s.optimize();
    sol.phase1_pivots = s.pivots;
    s.refactor();
    s.compute_values();
    if (s.objective_value() > kFeasTol) {
      throw InfeasibleError("linear program is infeasible (phase 1 objective " +
                          std::to_string(s.objective_value()) + ")");
    }
    s.drive_out_artificials();
    for (int j = k; j < s.total; ++j) {
      s.lo[j] = s.hi[j] = 0.0;
      if (s.basic_row[j] < 0) s.status[j] = VarStatus::AtLower;
    }
  }

  s.c.setZero();
  s.c.head(k) = lp.c;
  s.optimize();
  sol.phase2_pivots = s.pivots - sol.phase1_pivots;
  s.refactor();
  s.compute_values();

  if (opts.detect_ties) {
    const Eigen::VectorXd y = s.duals();
    for (int j = 0; j < k; ++j) {
      if (s.basic_row[j] >= 0) continue;
      if (s.lo[j] == s.hi[j]) continue;
      const double d = s.c[j] - s.a.col(j).dot(y);
      if (std::abs(d) <= kOptTol) {
        throw TieError("optimal vertex is not unique (variable " +
                       std::to_string(j) + " has zero reduced cost)");
      }
    }
  }

  sol.x = s.x.head(k);
  sol.objective = lp.c.dot(sol.x);
  sol.status.assign(s.status.begin(), s.status.begin() + k);
  sol.basis.resize(m);
  for (int i = 0; i < m; ++i) {
    if (s.basic[i] >= k) {
      throw SolverError("artificial variable stuck in final basis");
    }
    sol.basis[i] = s.basic[i];
  }
  return sol;
}

double violation(const LinearProgram& lp, const Eigen::VectorXd& x) {
  double v = (lp.a * x - lp.b).cwiseAbs().maxCoeff();
  for (int j = 0; j < lp.num_vars(); ++j) {
    if (std::isfinite(lp.lower[j])) v = std::max(v, lp.lower[j] - x[j]);
    if (std::isfinite(lp.upper[j])) v = std::max(v, x[j] - lp.upper[j]);
  }
  return std::max(v, 0.0);
}

}  // namespace zonodpp::lp
