#ifndef ZONODPP_MODELS_HPP
#define ZONODPP_MODELS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "zonodpp/numerics.hpp"

namespace zonodpp {

// Undirected graph with canonical (u < v) edges. Edge order is the column
// order of the incidence feature matrix, so it is part of the model identity.
struct Graph {
  int num_vertices = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<double> weights;  // positive, 1.0 when unspecified

  int num_edges() const { return static_cast<int>(edges.size()); }
};

// K_m with edges in lexicographic order.
Graph complete_graph(int m);

// Barabasi-Albert preferential attachment: complete seed graph on k vertices,
// then each new vertex attaches k edges to distinct existing vertices drawn
// proportionally to degree. Connected by construction, deterministic in seed.
Graph barabasi_albert(int m, int k, std::uint64_t seed);

// Format: first line "m", then one edge per line "u v [w]" with 0-based
// vertices and optional positive weight.
Graph load_edge_list(const std::string& path);

bool is_connected(const Graph& g);

// First m-1 rows of the vertex-edge incidence matrix: +1 at the lower
// endpoint, -1 at the higher, last vertex's row dropped. Bases of the
// resulting matroid are exactly the spanning trees. Requires a connected
// graph with at least m edges (r < n).
FeatureMatrix incidence_feature_matrix(const Graph& g);

enum class WeightMode {
  None,
  SqrtQ,    // replace A by columns sqrt(q_i) a_i everywhere (Section 3.4)
  QScaled,  // zonotope from columns q_i a_i, acceptance on the original A
};

struct BaseMeasure {
  Eigen::VectorXd q;  // positive per-column relevance
  WeightMode mode = WeightMode::None;
};

// The three matrices a weighted sampler needs. Both weighting modes leave the
// same projection DPP invariant: basis law proportional to
// det^2(A_{:B}) * prod_{i in B} q_i, which is det^2 of the law matrix.
struct WeightedModel {
  FeatureMatrix geometry;    // defines Z(A) for hit-and-run and extraction
  FeatureMatrix acceptance;  // volume ratios in the Alg. 4 acceptance
  FeatureMatrix law;         // sqrt-q scaled; det^2 gives the target law
};

WeightedModel apply_base_measure(const FeatureMatrix& a,
                                 const BaseMeasure& measure);

// Columns a_i scaled by factors[i] (> 0 so independence is preserved).
FeatureMatrix scale_columns(const FeatureMatrix& a,
                            const Eigen::VectorXd& factors);

// Format: first line "r n", then r whitespace-separated rows of n reals.
// With jitter enabled, a rank-deficient matrix is retried with small
// relative Gaussian noise added to every entry.
FeatureMatrix load_feature_matrix(const std::string& path, bool jitter = false,
                                  std::uint64_t jitter_seed = 0);

}  // namespace zonodpp

#endif
