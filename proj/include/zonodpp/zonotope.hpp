#ifndef ZONODPP_ZONOTOPE_HPP
#define ZONODPP_ZONOTOPE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "zonodpp/lp.hpp"
#include "zonodpp/numerics.hpp"
#include "zonodpp/rng.hpp"

namespace zonodpp {

// Gaussian objective fixing the Dyer-Frieze tiling of Z(A) for a whole run.
// Drawing it once (and recording the seed) makes tilings reproducible; a tie
// in P_x(A,c) forces a redraw, tracked by draw_index.
struct TilingObjective {
  Eigen::VectorXd c;
  std::uint64_t seed = 0;
  int draw_index = 0;
};

TilingObjective draw_tiling_objective(int n, std::uint64_t seed,
                                      int draw_index = 0);

// Tile decomposition of a point: x = A xi + A_{:B} u with u in [0,1]^r.
// xi is 0/1 off the basis and 0 on it.
struct TileDecomposition {
  Basis basis;
  Eigen::VectorXd xi;
};

// Segment {x + alpha d} intersected with Z(A); alpha_min <= 0 <= alpha_max.
struct Chord {
  Eigen::VectorXd origin;
  Eigen::VectorXd direction;
  double alpha_min = 0.0;
  double alpha_max = 0.0;

  double length() const { return alpha_max - alpha_min; }
  Eigen::VectorXd point_at(double alpha) const {
    return origin + alpha * direction;
  }
};

struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

// True iff x in Z(A) = A [0,1]^n (Phase I feasibility of Eq. 7).
bool contains(const FeatureMatrix& a, const Eigen::VectorXd& x);

// x = A u with u uniform on the hypercube. This is the chain initializer of
// Algorithm 5; it is NOT uniform on Z(A).
Eigen::VectorXd uniform_point(const FeatureMatrix& a, Rng& rng);

// Coordinate-wise bounding box of Z(A) from signed column sums.
Box bounding_box(const FeatureMatrix& a);

// Per-chain LP frontend holding the tiling objective and warm-start bases
// across consecutive MCMC steps (the LPs of nearby steps are related). Not
// thread safe; give each chain its own instance.
class TileExtractor {
 public:
  TileExtractor(const FeatureMatrix& a, TilingObjective objective);

  // Solves P_x(A,c) and reads the tile basis off the optimal vertex.
  // Throws NotInZonotopeError when x is outside Z(A) and TieError when the
  // optimum is not unique (redraw c and retry).
  TileDecomposition extract(const Eigen::VectorXd& x);

  // Chord endpoints along unit direction d through x: two LPs for
  // min / max alpha subject to A lambda - alpha d = x, lambda in [0,1]^n.
  Chord chord(const Eigen::VectorXd& x, const Eigen::VectorXd& d);

  const TilingObjective& objective() const { return objective_; }
  void set_objective(TilingObjective objective);
  void reset_warm_start();

 private:
  const FeatureMatrix& a_;
  TilingObjective objective_;
  std::vector<lp::VarStatus> warm_extract_;
  std::vector<lp::VarStatus> warm_chord_;
  bool has_warm_extract_ = false;
  bool has_warm_chord_ = false;
};

// One-shot wrappers for callers without chain state.
TileDecomposition extract_basis(const FeatureMatrix& a,
                                const TilingObjective& objective,
                                const Eigen::VectorXd& x);
Chord chord_endpoints(const FeatureMatrix& a, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& d);

// The fixed part xi of basis B's tile under objective c, from reduced costs:
// the tile is {A xi + A_{:B} u : u in [0,1]^r}. Throws TieError when some
// reduced cost vanishes and the tile of B is ill-defined under this c.
Eigen::VectorXd tile_anchor(const FeatureMatrix& a,
                            const TilingObjective& objective, const Basis& b);

}  // namespace zonodpp

#endif
