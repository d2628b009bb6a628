#include "zonodpp/zonotope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "zonodpp/errors.hpp"

namespace zonodpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

lp::LinearProgram tiling_lp(const FeatureMatrix& a, const Eigen::VectorXd& c,
                            const Eigen::VectorXd& x) {
  const int n = a.cols();
  lp::LinearProgram prog;
  prog.c = c;
  prog.a = a.matrix();
  prog.b = x;
  prog.lower = Eigen::VectorXd::Zero(n);
  prog.upper = Eigen::VectorXd::Ones(n);
  return prog;
}

// Eq. 8: variables (lambda, alpha), constraint A lambda - alpha d = x.
lp::LinearProgram chord_lp(const FeatureMatrix& a, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& d, double alpha_sign) {
  const int r = a.rows();
  const int n = a.cols();
  lp::LinearProgram prog;
  prog.a.resize(r, n + 1);
  prog.a.leftCols(n) = a.matrix();
  prog.a.col(n) = -d;
  prog.b = x;
  prog.c = Eigen::VectorXd::Zero(n + 1);
  prog.c[n] = alpha_sign;
  prog.lower = Eigen::VectorXd::Zero(n + 1);
  prog.upper = Eigen::VectorXd::Ones(n + 1);
  prog.lower[n] = -kInf;
  prog.upper[n] = kInf;
  return prog;
}

}  // namespace

TilingObjective draw_tiling_objective(int n, std::uint64_t seed,
                                      int draw_index) {
  if (n < 1) throw ConfigError("tiling objective needs n >= 1");
  if (draw_index < 0) throw ConfigError("draw_index must be nonnegative");
  Rng rng = Rng::stream(seed, stream_id(StreamDomain::Tiling, 0));
  TilingObjective obj;
  obj.seed = seed;
  obj.draw_index = draw_index;
  obj.c.resize(n);
  // Skip past earlier draws so redraws continue the same stream.
  for (int rep = 0; rep <= draw_index; ++rep) {
    for (int i = 0; i < n; ++i) obj.c[i] = rng.gaussian();
  }
  return obj;
}

bool contains(const FeatureMatrix& a, const Eigen::VectorXd& x) {
  if (x.size() != a.rows()) {
    throw std::invalid_argument("point dimension does not match rows of A");
  }
  lp::LinearProgram prog = tiling_lp(a, Eigen::VectorXd::Zero(a.cols()), x);
  try {
    lp::solve(prog);
    return true;
  } catch (const InfeasibleError&) {
    return false;
  }
}

Eigen::VectorXd uniform_point(const FeatureMatrix& a, Rng& rng) {
  Eigen::VectorXd u(a.cols());
  for (int i = 0; i < a.cols(); ++i) u[i] = rng.uniform01();
  return a.matrix() * u;
}

Box bounding_box(const FeatureMatrix& a) {
  Box box;
  box.lo = a.matrix().cwiseMin(0.0).rowwise().sum();
  box.hi = a.matrix().cwiseMax(0.0).rowwise().sum();
  return box;
}

TileExtractor::TileExtractor(const FeatureMatrix& a, TilingObjective objective)
    : a_(a), objective_(std::move(objective)) {
  if (objective_.c.size() != a_.cols()) {
    throw ConfigError("tiling objective dimension does not match cols of A");
  }
}

void TileExtractor::set_objective(TilingObjective objective) {
  if (objective.c.size() != a_.cols()) {
    throw ConfigError("tiling objective dimension does not match cols of A");
  }
  objective_ = std::move(objective);
  reset_warm_start();
}

void TileExtractor::reset_warm_start() {
  has_warm_extract_ = false;
  has_warm_chord_ = false;
}

TileDecomposition TileExtractor::extract(const Eigen::VectorXd& x) {
  if (x.size() != a_.rows()) {
    throw std::invalid_argument("point dimension does not match rows of A");
  }
  lp::LinearProgram prog = tiling_lp(a_, objective_.c, x);
  lp::SolveOptions opts;
  opts.detect_ties = true;
  if (has_warm_extract_) opts.warm_status = &warm_extract_;
  lp::LpSolution sol;
  try {
    sol = lp::solve(prog, opts);
  } catch (const InfeasibleError&) {
    throw NotInZonotopeError("extract_basis: point is outside Z(A)");
  }
  warm_extract_ = sol.status;
  has_warm_extract_ = true;

  // The optimal vertex has at most r fractional coordinates, all basic.
  // B = {i : y*_i in (0,1)} completed at degenerate vertices with the basic
  // variables resting at a bound, in increasing index order; that completion
  // is exactly the sorted LP basis, whose columns are independent.
  std::vector<int> indices = sol.basis;
  std::sort(indices.begin(), indices.end());
  for (int i = 0; i < static_cast<int>(sol.x.size()); ++i) {
    const double yi = sol.x[i];
    if (yi > lp::kBoundTol && yi < 1.0 - lp::kBoundTol &&
        !std::binary_search(indices.begin(), indices.end(), i)) {
      throw NumericalError("fractional coordinate outside the LP basis");
    }
  }

  TileDecomposition tile;
  tile.basis = make_basis(a_, std::move(indices));
  tile.xi = Eigen::VectorXd::Zero(a_.cols());
  for (int i = 0; i < a_.cols(); ++i) {
    if (tile.basis.contains(i)) continue;
    tile.xi[i] = sol.x[i] > 0.5 ? 1.0 : 0.0;
  }
  return tile;
}

Chord TileExtractor::chord(const Eigen::VectorXd& x, const Eigen::VectorXd& d) {
  if (x.size() != a_.rows() || d.size() != a_.rows()) {
    throw std::invalid_argument("chord dimensions do not match rows of A");
  }
  Chord ch;
  ch.origin = x;
  ch.direction = d;

  lp::LinearProgram prog = chord_lp(a_, x, d, +1.0);
  lp::SolveOptions opts;
  if (has_warm_chord_) opts.warm_status = &warm_chord_;
  lp::LpSolution lo;
  try {
    lo = lp::solve(prog, opts);
  } catch (const InfeasibleError&) {
    throw NotInZonotopeError("chord_endpoints: point is outside Z(A)");
  }

  prog.c[a_.cols()] = -1.0;
  lp::SolveOptions opts_hi;
  opts_hi.warm_status = &lo.status;  // same constraints, flipped objective
  const lp::LpSolution hi = lp::solve(prog, opts_hi);

  warm_chord_ = hi.status;
  has_warm_chord_ = true;

  // alpha = 0 is feasible for x in Z(A); clip the tolerance-level overshoot.
  ch.alpha_min = std::min(lo.objective, 0.0);
  ch.alpha_max = std::max(-hi.objective, 0.0);
  return ch;
}

TileDecomposition extract_basis(const FeatureMatrix& a,
                                const TilingObjective& objective,
                                const Eigen::VectorXd& x) {
  TileExtractor ex(a, objective);
  return ex.extract(x);
}

Chord chord_endpoints(const FeatureMatrix& a, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& d) {
  TileExtractor ex(a, TilingObjective{Eigen::VectorXd::Zero(a.cols()), 0, 0});
  return ex.chord(x, d);
}

Eigen::VectorXd tile_anchor(const FeatureMatrix& a,
                            const TilingObjective& objective, const Basis& b) {
  if (objective.c.size() != a.cols()) {
    throw ConfigError("tiling objective dimension does not match cols of A");
  }
  const Eigen::MatrixXd bmat = a.columns(b.indices);
  Eigen::VectorXd cb(a.rows());
  for (int i = 0; i < a.rows(); ++i) cb[i] = objective.c[b.indices[i]];
  const Eigen::VectorXd w = bmat.transpose().partialPivLu().solve(cb);

  // Nonbasic j sits at 0 when its reduced cost is positive (raising it would
  // increase the objective) and at 1 when negative.
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(a.cols());
  for (int j = 0; j < a.cols(); ++j) {
    if (b.contains(j)) continue;
    const double red = objective.c[j] - a.matrix().col(j).dot(w);
    if (std::abs(red) <= lp::kOptTol) {
      throw TieError("tile of basis is ill-defined: zero reduced cost");
    }
    xi[j] = red > 0.0 ? 0.0 : 1.0;
  }
  return xi;
}

}  // namespace zonodpp
